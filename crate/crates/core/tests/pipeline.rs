use std::collections::BTreeSet;

use tropline::catalog::{plane_law_holds, Catalog};
use tropline::count::{count_lines, CountOptions};
use tropline::lifting::alpha_lifting;
use tropline::line::{line_on_surface, line_subcomplex};
use tropline::subdivision::{subdivide, Triangulation};
use tropline::surface::build_surface;
use tropline::Rat;

#[test]
fn realized_lines_satisfy_the_line_invariants() {
    let cat = Catalog::builtin();
    for seed in [2, 4] {
        let x =
            build_surface(&alpha_lifting(3).unwrap().perturbed(&Rat::new(1, 100), seed)).unwrap();
        let c = count_lines(&cat, &x, &CountOptions::default()).unwrap();
        assert!(c.genericity.general);
        assert_eq!(c.total(), 27);
        assert!(c.total() <= c.candidate_total());
        let mut spans = BTreeSet::new();
        for f in &c.lines {
            let l = &f.line;
            assert!(line_on_surface(l, &x));
            let s = line_subcomplex(l, &x).unwrap();
            assert!(s.is_connected());
            assert!(
                spans.insert(format!("{:?}", s.maximal())),
                "two lines span one subcomplex"
            );
            let code = f.classification.code().unwrap();
            assert!(
                plane_law_holds(cat.get(code).unwrap(), l, &x).unwrap(),
                "{code}"
            );
        }
    }
}

#[test]
fn pure_alpha_families_are_sound() {
    let cat = Catalog::builtin();
    let x = build_surface(&alpha_lifting(3).unwrap()).unwrap();
    let c = count_lines(&cat, &x, &CountOptions::default()).unwrap();
    assert!(c.infinite());
    for f in &c.families {
        let (a, b) = f.family.witness.as_ref().expect("a witness pair");
        assert!(f.family.samples.len() >= 3);
        for m in &f.family.samples {
            assert!(line_on_surface(m, &x));
            assert!(m.contains(a) && m.contains(b));
        }
    }
}

#[test]
fn triangulation_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("tropline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("alpha4.json");
    let t = subdivide(&alpha_lifting(4).unwrap()).triangulation;
    t.write(&path).unwrap();
    let back = Triangulation::read(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(back == t);
    assert_eq!(back.canonical_hash(), t.canonical_hash());
}

#[test]
fn catalog_file_matches_builtin() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/catalog.json");
    let loaded = Catalog::load(std::path::Path::new(path)).unwrap();
    let builtin = Catalog::builtin();
    assert!(loaded.codes().eq(builtin.codes()));
}
