use proptest::prelude::*;

use tropline::lattice::lattice_points;
use tropline::lifting::{alpha_lifting, random_concave_lifting, random_lifting, Lifting};
use tropline::line::TropicalLine;
use tropline::subdivision::{secondary_cone_contains, subdivide};
use tropline::{Dir, Perm, Rat};

fn perm() -> impl Strategy<Value = Perm> {
    (0..24usize).prop_map(|k| Perm::all()[k])
}

fn dir_pair() -> impl Strategy<Value = [Dir; 2]> {
    (0u8..4, 1u8..4).prop_map(|(a, s)| [Dir::ALL[a as usize], Dir::ALL[((a + s) % 4) as usize]])
}

fn rat() -> impl Strategy<Value = Rat> {
    (-50i64..50, 1i64..8).prop_map(|(n, d)| Rat::new(n, d))
}

/// `l` plus the affine function `c + <v, a>`.
fn plus_affine(l: &Lifting, v: [i64; 3], c: i64) -> Lifting {
    let pts = lattice_points(l.delta()).unwrap();
    let values = pts
        .iter()
        .zip(l.values())
        .map(|(p, x)| x.clone() + Rat::from_int(c + v[0] * p.0[0] + v[1] * p.0[1] + v[2] * p.0[2]))
        .collect();
    Lifting::new(l.delta(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lifting_induces_its_own_subdivision(seed in any::<u64>(), delta in 1i64..=3) {
        let l = random_concave_lifting(delta, seed, -30, 30).unwrap();
        let s = subdivide(&l);
        prop_assume!(s.is_triangulation);
        prop_assert!(secondary_cone_contains(&s.triangulation, &l).unwrap());
    }

    #[test]
    fn affine_shifts_keep_the_subdivision(seed in any::<u64>(), v in prop::array::uniform3(-20i64..20), c in -20i64..20) {
        let l = random_lifting(3, seed, -40, 40).unwrap();
        let a = subdivide(&l).triangulation;
        let b = subdivide(&plus_affine(&l, v, c)).triangulation;
        prop_assert!(a == b);
    }

    #[test]
    fn subdivision_is_s4_equivariant(seed in any::<u64>(), sigma in perm()) {
        let l = random_concave_lifting(3, seed, -30, 30).unwrap();
        let a = subdivide(&l).triangulation;
        let b = subdivide(&l.permuted(&sigma)).triangulation;
        prop_assert!(a.s4_act(&sigma) == b);
        prop_assert_eq!(a.canonical_hash(), b.canonical_hash());
    }

    #[test]
    fn small_perturbations_agree_with_the_cone_test(seed in any::<u64>(), den in prop::sample::select(vec![10i64, 100, 1000])) {
        let alpha = alpha_lifting(3).unwrap();
        let t = subdivide(&alpha).triangulation;
        let l = alpha.perturbed(&Rat::new(1, den), seed);
        let same = subdivide(&l).triangulation == t;
        prop_assert_eq!(secondary_cone_contains(&t, &l).unwrap(), same);
    }

    #[test]
    fn lifting_json_round_trips(seed in any::<u64>(), delta in 1i64..=4) {
        let l = random_lifting(delta, seed, -100, 100).unwrap().perturbed(&Rat::new(1, 7), seed);
        let back = Lifting::from_json(&l.to_json()).unwrap();
        prop_assert_eq!(back.values(), l.values());
    }

    #[test]
    fn lines_are_balanced_and_contain_their_vertices(
        v in prop::array::uniform3(rat()),
        pair in dir_pair(),
        t in rat(),
    ) {
        let l = TropicalLine::new(v.clone(), pair, &t.abs()).unwrap();
        for b in l.balancing() {
            prop_assert_eq!(b, [0, 0, 0]);
        }
        prop_assert!(l.contains(l.v1()) && l.contains(l.v2()));
        prop_assert!(l.contains(&v));
        prop_assert_eq!(l.is_degenerate(), t.is_zero());
    }

    #[test]
    fn line_points_lie_on_rays(v in prop::array::uniform3(rat()), pair in dir_pair(), t in 1i64..10, s in 0i64..50) {
        let l = TropicalLine::new(v, pair, &Rat::from_int(t)).unwrap();
        for (base, d) in l.rays() {
            let w = d.vector();
            let q = [
                base[0].clone() + Rat::from_int(s * w[0]),
                base[1].clone() + Rat::from_int(s * w[1]),
                base[2].clone() + Rat::from_int(s * w[2]),
            ];
            prop_assert!(l.contains(&q));
        }
    }
}
