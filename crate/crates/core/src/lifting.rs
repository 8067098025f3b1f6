//! Lifting functions on the lattice points of the simplex of degree `delta`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_points, s4_act, LatticePoint, Perm};
use crate::rat::Rat;

/// Exact rational value per lattice point of the simplex. Values are stored
/// in the lexicographic order of [`lattice_points`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifting {
    delta: i64,
    points: Vec<LatticePoint>,
    values: Vec<Rat>,
}

impl Lifting {
    pub fn new(delta: i64, values: Vec<Rat>) -> Result<Self> {
        let points = lattice_points(delta)?;
        if values.len() != points.len() {
            return Err(Error::Lifting(format!(
                "expected {} values for degree {delta}, got {}",
                points.len(),
                values.len()
            )));
        }
        Ok(Lifting {
            delta,
            points,
            values,
        })
    }

    pub fn from_fn(delta: i64, mut f: impl FnMut(&LatticePoint) -> Rat) -> Result<Self> {
        let points = lattice_points(delta)?;
        let values = points.iter().map(&mut f).collect();
        Ok(Lifting {
            delta,
            points,
            values,
        })
    }

    pub fn constant(delta: i64, c: Rat) -> Result<Self> {
        Self::from_fn(delta, |_| c.clone())
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// The value at `p`. Panics when `p` is outside the simplex.
    pub fn value(&self, p: &LatticePoint) -> &Rat {
        let i = self
            .index_of(p)
            .unwrap_or_else(|| panic!("{p} is not a lattice point of degree {}", self.delta));
        &self.values[i]
    }

    pub fn value_at(&self, x: i64, y: i64, z: i64) -> &Rat {
        self.value(&LatticePoint::new(x, y, z))
    }

    pub fn set(&mut self, p: &LatticePoint, v: Rat) -> Result<()> {
        let i = self
            .index_of(p)
            .ok_or(Error::OutsideSimplex(*p, self.delta))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn scale(&self, s: &Rat) -> Lifting {
        Lifting {
            delta: self.delta,
            points: self.points.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn neg(&self) -> Lifting {
        self.scale(&Rat::from_int(-1))
    }

    pub fn add(&self, other: &Lifting) -> Result<Lifting> {
        if self.delta != other.delta {
            return Err(Error::DegreeMismatch(self.delta, other.delta));
        }
        Ok(Lifting {
            delta: self.delta,
            points: self.points.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `self ∘ sigma^{-1}`: the value at `sigma(a)` is the old value at `a`.
    pub fn permuted(&self, sigma: &Perm) -> Lifting {
        let mut values = vec![Rat::zero(); self.values.len()];
        for (a, v) in self.points.iter().zip(&self.values) {
            let b = s4_act(sigma, a, self.delta).expect("lattice point of the simplex");
            values[self.index_of(&b).unwrap()] = v.clone();
        }
        Lifting {
            delta: self.delta,
            points: self.points.clone(),
            values,
        }
    }

    /// Adds to every value an independent uniform rational in
    /// `[-magnitude, magnitude]` with denominator granularity 1000.
    pub fn perturbed(&self, magnitude: &Rat, seed: u64) -> Lifting {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = Rat::from_int(1000);
        let values = self
            .values
            .iter()
            .map(|v| {
                let k: i64 = rng.gen_range(-1000..=1000);
                v + magnitude * &Rat::from_int(k) / &steps
            })
            .collect();
        Lifting {
            delta: self.delta,
            points: self.points.clone(),
            values,
        }
    }

    pub fn to_json(&self) -> LiftingFile {
        LiftingFile {
            delta: self.delta,
            values: self
                .points
                .iter()
                .zip(&self.values)
                .map(|(p, v)| LiftingEntry {
                    point: p.0,
                    value: v.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(file: &LiftingFile) -> Result<Lifting> {
        let points = lattice_points(file.delta)?;
        let mut values: Vec<Option<Rat>> = vec![None; points.len()];
        for e in &file.values {
            let p = LatticePoint(e.point);
            let i = points.binary_search(&p).map_err(|_| {
                Error::Parse(format!(
                    "point {p} is not in the simplex of degree {}",
                    file.delta
                ))
            })?;
            if values[i].is_some() {
                return Err(Error::Parse(format!("point {p} appears twice")));
            }
            values[i] = Some(e.value.clone());
        }
        let values = values
            .into_iter()
            .zip(&points)
            .map(|(v, p)| v.ok_or_else(|| Error::Parse(format!("missing value for point {p}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Lifting {
            delta: file.delta,
            points,
            values,
        })
    }

    pub fn read(path: &Path) -> Result<Lifting> {
        let text = std::fs::read_to_string(path)?;
        let file: LiftingFile = serde_json::from_str(&text).map_err(|e| {
            Error::Parse(format!(
                "{}: line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        Lifting::from_json(&file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftingFile {
    pub delta: i64,
    pub values: Vec<LiftingEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftingEntry {
    pub point: [i64; 3],
    pub value: Rat,
}

/// `-2x^2 - 2y^2 - 2z^2 - xy - 2xz - 2yz`.
pub fn alpha(p: &LatticePoint) -> i64 {
    let [x, y, z] = p.0;
    -2 * x * x - 2 * y * y - 2 * z * z - x * y - 2 * x * z - 2 * y * z
}

pub fn alpha_lifting(delta: i64) -> Result<Lifting> {
    Lifting::from_fn(delta, |p| Rat::from_int(alpha(p)))
}

/// Deterministic uniform integer values in `[lo, hi]`.
pub fn random_lifting(delta: i64, seed: u64, lo: i64, hi: i64) -> Result<Lifting> {
    if lo > hi {
        return Err(Error::Lifting(format!("empty range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Lifting::from_fn(delta, |_| Rat::from_int(rng.gen_range(lo..=hi)))
}

/// A random strictly concave quadratic plus uniform integer noise in
/// `[lo, hi]`: `-10 (|Bx|^2 + |x|^2) + noise` with the entries of `B` uniform
/// in `[-5, 5]`. Concavity makes the induced subdivision use every lattice
/// point, so most draws are regular elementary triangulations.
pub fn random_concave_lifting(delta: i64, seed: u64, lo: i64, hi: i64) -> Result<Lifting> {
    if lo > hi {
        return Err(Error::Lifting(format!("empty range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<i64> = (0..9).map(|_| rng.gen_range(-5..=5)).collect();
    Lifting::from_fn(delta, |p| {
        let x = p.0;
        let bx = (0..3).map(|i| (0..3).map(|j| b[3 * i + j] * x[j]).sum::<i64>());
        let q: i64 = bx.map(|v| v * v).sum::<i64>() + x.iter().map(|v| v * v).sum::<i64>();
        Rat::from_int(-10 * q + rng.gen_range(lo..=hi))
    })
}
