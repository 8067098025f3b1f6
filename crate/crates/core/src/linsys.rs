//! Exact feasibility for small systems of linear equalities and (strict or
//! non-strict) inequalities over the rationals.
//!
//! Equalities are eliminated first by Gaussian elimination; the remaining
//! inequalities are decided by Fourier-Motzkin elimination with strictness
//! tracking. The dimension of a non-empty solution set is found by detecting
//! implicit equalities among the non-strict inequalities.

use std::collections::HashMap;

use crate::rat::Rat;

/// `sum coeffs[i] * x_i + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn zero(n: usize) -> Self {
        AffineForm {
            coeffs: vec![Rat::zero(); n],
            constant: Rat::zero(),
        }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        AffineForm {
            coeffs: vec![Rat::zero(); n],
            constant: c,
        }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut f = AffineForm::zero(n);
        f.coeffs[i] = Rat::one();
        f
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(x) {
            if !c.is_zero() {
                acc += c * v;
            }
        }
        acc
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        AffineForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        AffineForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            constant: &self.constant - &other.constant,
        }
    }

    pub fn scale(&self, s: &Rat) -> AffineForm {
        AffineForm {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
            constant: &self.constant * s,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Scales so that the first non-zero coefficient has absolute value 1.
    fn normalized(&self) -> AffineForm {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) => self.scale(&c.abs().recip()),
            None => self.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `form == 0`
    Eq,
    /// `form >= 0`
    Ge,
    /// `form > 0`
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub form: AffineForm,
    pub rel: Relation,
}

impl Constraint {
    pub fn holds_at(&self, x: &[Rat]) -> bool {
        let v = self.form.eval(x);
        match self.rel {
            Relation::Eq => v.is_zero(),
            Relation::Ge => !v.is_negative(),
            Relation::Gt => v.is_positive(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinSystem {
    nvars: usize,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Empty,
    Point(Vec<Rat>),
    /// Positive-dimensional solution set. The witness lies in its relative
    /// interior.
    Positive {
        dim: usize,
        witness: Vec<Rat>,
    },
}

impl Feasibility {
    pub fn is_empty(&self) -> bool {
        matches!(self, Feasibility::Empty)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Feasibility::Empty => None,
            Feasibility::Point(_) => Some(0),
            Feasibility::Positive { dim, .. } => Some(*dim),
        }
    }

    pub fn witness(&self) -> Option<&[Rat]> {
        match self {
            Feasibility::Empty => None,
            Feasibility::Point(p) => Some(p),
            Feasibility::Positive { witness, .. } => Some(witness),
        }
    }
}

impl LinSystem {
    pub fn new(nvars: usize) -> Self {
        LinSystem {
            nvars,
            constraints: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, form: AffineForm, rel: Relation) {
        assert_eq!(
            form.nvars(),
            self.nvars,
            "form arity does not match the system"
        );
        self.constraints.push(Constraint { form, rel });
    }

    pub fn eq(&mut self, form: AffineForm) {
        self.push(form, Relation::Eq);
    }

    pub fn ge(&mut self, form: AffineForm) {
        self.push(form, Relation::Ge);
    }

    pub fn gt(&mut self, form: AffineForm) {
        self.push(form, Relation::Gt);
    }

    /// Convenience for tests and examples: coefficients given as integers.
    pub fn push_int(&mut self, coeffs: &[i64], constant: i64, rel: Relation) {
        let form = AffineForm {
            coeffs: coeffs.iter().map(|&c| Rat::from_int(c)).collect(),
            constant: Rat::from_int(constant),
        };
        self.push(form, rel);
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(x))
    }

    pub fn solve(&self) -> Feasibility {
        solve_feasible(self)
    }

    /// Full description of the solution set, or `None` when empty.
    pub fn solution_set(&self) -> Option<SolutionSet> {
        SolutionSet::compute(self)
    }
}

/// Exact classification of the solution set of `sys`.
pub fn solve_feasible(sys: &LinSystem) -> Feasibility {
    match SolutionSet::compute(sys) {
        None => Feasibility::Empty,
        Some(s) if s.dim == 0 => Feasibility::Point(s.relint_point),
        Some(s) => Feasibility::Positive {
            dim: s.dim,
            witness: s.relint_point,
        },
    }
}

/// A non-empty solution set: its dimension, a point in its relative
/// interior and a basis of the direction space of its affine hull.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub dim: usize,
    pub relint_point: Vec<Rat>,
    pub directions: Vec<Vec<Rat>>,
    system: LinSystem,
}

impl SolutionSet {
    fn compute(sys: &LinSystem) -> Option<SolutionSet> {
        let n = sys.nvars;
        let eqs: Vec<&AffineForm> = sys
            .constraints
            .iter()
            .filter(|c| c.rel == Relation::Eq)
            .map(|c| &c.form)
            .collect();
        let param = Param::from_equalities(n, &eqs)?;
        let mut ineqs: Vec<(AffineForm, bool)> = sys
            .constraints
            .iter()
            .filter(|c| c.rel != Relation::Eq)
            .map(|c| (param.pull_back(&c.form), c.rel == Relation::Gt))
            .collect();
        let k = param.free.len();
        fm_feasible(k, &ineqs)?;

        // Implicit equalities: non-strict inequalities that cannot be made strict.
        let mut implicit: Vec<AffineForm> = Vec::new();
        for i in 0..ineqs.len() {
            if ineqs[i].1 || ineqs[i].0.is_constant() {
                continue;
            }
            let mut test = ineqs.clone();
            test[i].1 = true;
            if fm_feasible(k, &test).is_none() {
                implicit.push(ineqs[i].0.clone());
            }
        }
        let sub = Param::from_equalities(k, &implicit.iter().collect::<Vec<_>>())
            .expect("implicit equalities of a feasible system are consistent");
        let dim = sub.free.len();

        // A relative-interior point: all remaining inequalities strict.
        for (form, strict) in ineqs.iter_mut() {
            if !implicit.contains(form) {
                *strict = true;
            }
        }
        let mut inner: Vec<(AffineForm, bool)> =
            ineqs.iter().map(|(f, s)| (sub.pull_back(f), *s)).collect();
        inner.retain(|(f, _)| !f.is_constant());
        let y = fm_feasible(dim, &inner).expect("relative interior of a non-empty polyhedron");
        let mid = sub.push_forward(&y);
        let point = param.push_forward(&mid);

        let directions = (0..dim)
            .map(|j| {
                let mut e = vec![Rat::zero(); dim];
                e[j] = Rat::one();
                let d_mid = sub.push_direction(&e);
                param.push_direction(&d_mid)
            })
            .collect();
        debug_assert!(sys.satisfied_by(&point));
        Some(SolutionSet {
            dim,
            relint_point: point,
            directions,
            system: sys.clone(),
        })
    }

    /// `count` distinct points of the solution set on the line through the
    /// relative-interior point along the first direction. Returns just the
    /// interior point when the set is a point.
    pub fn sample(&self, count: usize) -> Vec<Vec<Rat>> {
        if self.dim == 0 || count <= 1 {
            return vec![self.relint_point.clone()];
        }
        let d = &self.directions[0];
        let (lo, hi) = self.interval_along(d);
        let param = |i: usize| -> Rat {
            let i1 = Rat::from_int(i as i64 + 1);
            match (&lo, &hi) {
                (Some(l), Some(h)) => l + (h - l) * i1 / Rat::from_int(count as i64 + 1),
                (None, Some(h)) => h - i1,
                (Some(l), None) => l + i1,
                (None, None) => i1,
            }
        };
        (0..count)
            .map(|i| {
                let s = param(i);
                self.relint_point
                    .iter()
                    .zip(d)
                    .map(|(p, di)| p + &(di * &s))
                    .collect()
            })
            .filter(|x: &Vec<Rat>| self.system.satisfied_by(x))
            .collect()
    }

    /// Open interval of `s` with `relint_point + s * d` feasible, as optional
    /// lower and upper ends.
    fn interval_along(&self, d: &[Rat]) -> (Option<Rat>, Option<Rat>) {
        let p = &self.relint_point;
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for c in &self.system.constraints {
            if c.rel == Relation::Eq {
                continue;
            }
            let slope: Rat = c.form.coeffs.iter().zip(d).map(|(a, b)| a * b).sum();
            if slope.is_zero() {
                continue;
            }
            let at = c.form.eval(p);
            let s = -(at / &slope);
            if slope.is_positive() {
                if lo.as_ref().is_none_or(|l| &s > l) {
                    lo = Some(s);
                }
            } else if hi.as_ref().is_none_or(|h| &s < h) {
                hi = Some(s);
            }
        }
        (lo, hi)
    }
}

/// Affine parametrization `x = base + sum_j y_j * basis_j` of the solution
/// space of a set of equalities, with `y` the free variables.
#[derive(Clone, Debug)]
struct Param {
    n: usize,
    free: Vec<usize>,
    /// For each variable, its expression in the free variables.
    expr: Vec<AffineForm>,
}

impl Param {
    fn from_equalities(n: usize, eqs: &[&AffineForm]) -> Option<Param> {
        let mut rows: Vec<AffineForm> = eqs.iter().map(|f| (*f).clone()).collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(pr) = (r..rows.len()).find(|&i| !rows[i].coeffs[col].is_zero()) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = rows[r].coeffs[col].recip();
            rows[r] = rows[r].scale(&inv);
            for i in 0..rows.len() {
                if i != r && !rows[i].coeffs[col].is_zero() {
                    let f = rows[i].coeffs[col].clone();
                    rows[i] = rows[i].sub(&rows[r].scale(&f));
                }
            }
            pivots.push((r, col));
            r += 1;
        }
        if rows[r..].iter().any(|row| !row.constant.is_zero()) {
            return None;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let k = free.len();
        let mut expr = vec![AffineForm::zero(k); n];
        for (j, &c) in free.iter().enumerate() {
            expr[c] = AffineForm::var(k, j);
        }
        for &(row, col) in &pivots {
            // x_col + sum_{free} a_f x_f + const = 0
            let mut e = AffineForm::constant(k, -rows[row].constant.clone());
            for (j, &f) in free.iter().enumerate() {
                e.coeffs[j] = -rows[row].coeffs[f].clone();
            }
            expr[col] = e;
        }
        Some(Param { n, free, expr })
    }

    fn pull_back(&self, form: &AffineForm) -> AffineForm {
        let k = self.free.len();
        let mut out = AffineForm::constant(k, form.constant.clone());
        for (i, c) in form.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.expr[i].scale(c));
            }
        }
        out
    }

    fn push_forward(&self, y: &[Rat]) -> Vec<Rat> {
        (0..self.n).map(|i| self.expr[i].eval(y)).collect()
    }

    fn push_direction(&self, d: &[Rat]) -> Vec<Rat> {
        (0..self.n)
            .map(|i| self.expr[i].coeffs.iter().zip(d).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Fourier-Motzkin feasibility of `form > 0` (strict) / `form >= 0` over
/// `k` variables. Returns a witness when feasible.
fn fm_feasible(k: usize, ineqs: &[(AffineForm, bool)]) -> Option<Vec<Rat>> {
    let mut levels: Vec<Vec<(AffineForm, bool)>> = Vec::with_capacity(k + 1);
    let mut current = dedup(ineqs.to_vec());
    for var in (0..k).rev() {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut rest = Vec::new();
        for (f, s) in &current {
            let c = &f.coeffs[var];
            if c.is_positive() {
                lower.push((f.clone(), *s));
            } else if c.is_negative() {
                upper.push((f.clone(), *s));
            } else {
                rest.push((f.clone(), *s));
            }
        }
        for (lf, ls) in &lower {
            for (uf, us) in &upper {
                // a*x + L >= 0 with a > 0, -b*x + U >= 0 with b > 0
                let a = lf.coeffs[var].clone();
                let b = -uf.coeffs[var].clone();
                let combined = lf.scale(&b).add(&uf.scale(&a));
                rest.push((combined, *ls || *us));
            }
        }
        levels.push(current);
        current = dedup(rest);
    }
    for (f, strict) in &current {
        let v = &f.constant;
        if v.is_negative() || (*strict && v.is_zero()) {
            return None;
        }
    }
    // Back-substitution, innermost eliminated variable last.
    let mut x = vec![Rat::zero(); k];
    for var in 0..k {
        let level = &levels[k - 1 - var];
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for (f, strict) in level {
            let c = &f.coeffs[var];
            if c.is_zero() {
                continue;
            }
            // c * x_var + rest >= 0, other eliminated-later vars already fixed
            let mut rest = f.constant.clone();
            for (j, cj) in f.coeffs.iter().enumerate() {
                if j != var && !cj.is_zero() {
                    rest += cj * &x[j];
                }
            }
            let bound = -(rest / c);
            if c.is_positive() {
                let better = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && *strict && !s),
                };
                if better {
                    lo = Some((bound, *strict));
                }
            } else {
                let better = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && *strict && !s),
                };
                if better {
                    hi = Some((bound, *strict));
                }
            }
        }
        x[var] = match (lo, hi) {
            (None, None) => Rat::zero(),
            (Some((l, false)), _) => l,
            (Some((l, true)), None) => l + Rat::one(),
            (None, Some((h, false))) => h,
            (None, Some((h, true))) => h - Rat::one(),
            (Some((l, true)), Some((h, false))) => h.max(l),
            (Some((l, true)), Some((h, true))) => (l + h) / Rat::from_int(2),
        };
    }
    Some(x)
}

fn dedup(v: Vec<(AffineForm, bool)>) -> Vec<(AffineForm, bool)> {
    let mut best: HashMap<AffineForm, bool> = HashMap::new();
    let mut order = Vec::new();
    for (f, s) in v {
        let n = f.normalized();
        if n.is_constant() {
            // keep constant checks as-is (sign matters, not scale)
            let key = AffineForm::constant(n.nvars(), Rat::from_int(n.constant.signum() as i64));
            match best.get_mut(&key) {
                Some(old) => *old |= s,
                None => {
                    best.insert(key.clone(), s);
                    order.push(key);
                }
            }
            continue;
        }
        match best.get_mut(&n) {
            Some(old) => *old |= s,
            None => {
                best.insert(n.clone(), s);
                order.push(n);
            }
        }
    }
    // Among parallel constraints with equal coefficients keep the tightest.
    let mut by_dir: HashMap<Vec<Rat>, (Rat, bool)> = HashMap::new();
    let mut dir_order = Vec::new();
    for f in order {
        let s = best[&f];
        let key = f.coeffs.clone();
        match by_dir.get_mut(&key) {
            Some((c, st)) => {
                if f.constant < *c || (f.constant == *c && s) {
                    *c = f.constant.clone();
                    *st = s;
                }
            }
            None => {
                by_dir.insert(key.clone(), (f.constant.clone(), s));
                dir_order.push(key);
            }
        }
    }
    dir_order
        .into_iter()
        .map(|coeffs| {
            let (c, s) = by_dir.remove(&coeffs).unwrap();
            (
                AffineForm {
                    coeffs,
                    constant: c,
                },
                s,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn pinned_system() {
        let mut s = LinSystem::new(2);
        s.push_int(&[1, 0], -1, Relation::Eq);
        s.push_int(&[0, 1], -2, Relation::Eq);
        s.push_int(&[1, 1], 0, Relation::Ge);
        assert_eq!(s.solve(), Feasibility::Point(vec![r(1), r(2)]));
    }

    #[test]
    fn contradictory_bounds() {
        let mut s = LinSystem::new(1);
        s.push_int(&[1], -1, Relation::Ge);
        s.push_int(&[-1], 0, Relation::Ge);
        assert_eq!(s.solve(), Feasibility::Empty);
    }

    #[test]
    fn one_free_parameter() {
        let mut s = LinSystem::new(2);
        s.push_int(&[1, -1], 0, Relation::Eq);
        s.push_int(&[1, 0], 0, Relation::Ge);
        match s.solve() {
            Feasibility::Positive { dim, witness } => {
                assert_eq!(dim, 1);
                assert!(s.satisfied_by(&witness));
            }
            other => panic!("expected a ray, got {other:?}"),
        }
    }

    #[test]
    fn implicit_equality_collapses_dimension() {
        // x >= 0, -x >= 0, y free in [0, 1]
        let mut s = LinSystem::new(2);
        s.push_int(&[1, 0], 0, Relation::Ge);
        s.push_int(&[-1, 0], 0, Relation::Ge);
        s.push_int(&[0, 1], 0, Relation::Ge);
        s.push_int(&[0, -1], 1, Relation::Ge);
        assert_eq!(s.solve().dim(), Some(1));
        s.push_int(&[0, 1], -1, Relation::Ge);
        assert_eq!(s.solve(), Feasibility::Point(vec![r(0), r(1)]));
    }

    #[test]
    fn strict_inequalities() {
        let mut s = LinSystem::new(1);
        s.push_int(&[1], 0, Relation::Gt);
        s.push_int(&[-1], 0, Relation::Ge);
        assert!(s.solve().is_empty());
        let mut s = LinSystem::new(2);
        s.push_int(&[1, 0], 0, Relation::Gt);
        s.push_int(&[-1, 0], 1, Relation::Gt);
        s.push_int(&[0, 1], 0, Relation::Eq);
        let f = s.solve();
        assert_eq!(f.dim(), Some(1));
        assert!(s.satisfied_by(f.witness().unwrap()));
    }

    #[test]
    fn sampling_stays_inside() {
        let mut s = LinSystem::new(2);
        s.push_int(&[1, -1], 0, Relation::Eq);
        s.push_int(&[1, 0], 0, Relation::Ge);
        s.push_int(&[-1, 0], 5, Relation::Gt);
        let set = s.solution_set().unwrap();
        let pts = set.sample(3);
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!(s.satisfied_by(p));
        }
        assert!(pts[0] != pts[1] && pts[1] != pts[2]);
    }

    /// Brute-force oracle: the solution set of a non-strict system in up to
    /// three unknowns is non-empty iff some vertex (intersection of
    /// `nvars` tight constraints) or, for unbounded/lineal sets, some point
    /// on a grid scan is feasible. Dimension is checked via the affine hull
    /// of all tight-subset solutions found on a fine rational grid.
    fn brute_force_feasible(s: &LinSystem) -> bool {
        let n = s.nvars();
        // candidate points: solutions of every choice of n constraints as equalities
        let cons = s.constraints();
        let idx: Vec<usize> = (0..cons.len()).collect();
        let mut found = false;
        let mut choose = vec![0usize; n];
        fn rec(
            s: &LinSystem,
            idx: &[usize],
            start: usize,
            depth: usize,
            choose: &mut Vec<usize>,
            found: &mut bool,
        ) {
            if *found {
                return;
            }
            if depth == choose.len() {
                let mut t = LinSystem::new(s.nvars());
                for &i in choose.iter() {
                    t.eq(s.constraints()[i].form.clone());
                }
                if let Some(p) = Param::from_equalities(
                    s.nvars(),
                    &t.constraints().iter().map(|c| &c.form).collect::<Vec<_>>(),
                ) {
                    let zero = vec![Rat::zero(); p.free.len()];
                    let x = p.push_forward(&zero);
                    if s.satisfied_by(&x) {
                        *found = true;
                    }
                }
                return;
            }
            for i in start..idx.len() {
                choose[depth] = idx[i];
                rec(s, idx, i + 1, depth + 1, choose, found);
            }
        }
        for d in 0..=n.min(cons.len()) {
            let mut c = vec![0usize; d];
            rec(s, &idx, 0, 0, &mut c, &mut found);
            if found {
                return true;
            }
        }
        let _ = &mut choose;
        found
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_vertex_enumeration(
            n in 1usize..=3,
            rows in proptest::collection::vec(
                (proptest::collection::vec(-2i64..=2, 3), -3i64..=3), 1..=6)
        ) {
            let mut s = LinSystem::new(n);
            for (c, k) in &rows {
                s.push_int(&c[..n], *k, Relation::Ge);
            }
            let fm = s.solve();
            if let Some(w) = fm.witness() {
                prop_assert!(s.satisfied_by(w));
            }
            prop_assert_eq!(!fm.is_empty(), brute_force_feasible(&s));
        }
    }
}
