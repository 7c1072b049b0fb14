use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{frac, q, Poly, QMatrix, RealRoot, Q};

use super::BisubstDecomposition;

/// Class-weight matrix `v`: entry `αβ` is `Σ_c a_{αβ,c}·w_c` with `a` the
/// absorption probabilities, so recurrent pairs carry their class weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrixV {
    pub params: Vec<Q>,
    pub matrix: QMatrix,
}

impl WeightMatrixV {
    /// Row-major `d²` vector, lexicographic pair order.
    pub fn flattened(&self) -> Vec<Q> {
        (0..self.matrix.rows())
            .flat_map(|r| self.matrix.row(r).to_vec())
            .collect()
    }

    /// All eigenvalues with multiplicity when they are rational.
    pub fn rational_eigenvalues(&self) -> Option<Vec<(Q, usize)>> {
        let cp = self.matrix.char_poly();
        let (roots, rest) = cp.rational_roots()?;
        (rest.degree() == Some(0)).then_some(roots)
    }

    pub fn is_psd(&self) -> bool {
        self.matrix.is_psd()
    }
}

/// `v` for class parameters `w` (one per ergodic class).
pub fn build_v(decomp: &BisubstDecomposition, w: &[Q]) -> Result<WeightMatrixV> {
    if w.len() != decomp.class_count() {
        return Err(Error::ParameterCount {
            expected: decomp.class_count(),
            got: w.len(),
        });
    }
    let n = decomp.pair_count();
    let d = (n as f64).sqrt().round() as usize;
    let mut matrix = QMatrix::zeros(d, d);
    for p in 0..n {
        matrix[(p / d, p % d)] = decomp.absorption[p]
            .iter()
            .zip(w)
            .fold(Q::zero(), |acc, (a, wc)| acc + a * wc);
    }
    Ok(WeightMatrixV {
        params: w.to_vec(),
        matrix,
    })
}

/// One end of the semidefinite parameter range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Exact(Q),
    /// An irrational boundary, isolated to a small rational interval.
    Algebraic(RealRoot),
    Unbounded,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Exact(v) => write!(f, "{v}"),
            Endpoint::Algebraic(r) => write!(f, "{r}"),
            Endpoint::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Generator of the semidefinite cone of class weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeRay {
    pub name: String,
    pub params: Vec<Q>,
    /// Flattened `v`, lexicographic pair order.
    pub vector: Vec<Q>,
}

/// Positive semidefinite range of `v` with the first class weight fixed to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semipositivity {
    pub class_count: usize,
    /// Range of `w_2` (two classes only).
    pub lower: Option<Endpoint>,
    pub upper: Option<Endpoint>,
    /// `E_j(w_2)`, the sum of `j × j` principal minors of `v(1, w_2)`,
    /// for `j = 1..=d`; `v` is PSD iff all are nonnegative.
    pub invariants: Vec<Poly>,
    /// Rays at the rational endpoints: upper end first.
    pub rays: Vec<ExtremeRay>,
}

const ISOLATION_WIDTH: i64 = 1 << 40;

/// Semidefinite range and extreme rays of the class-weight family.
pub fn semipositivity(decomp: &BisubstDecomposition) -> Result<Semipositivity> {
    match decomp.class_count() {
        1 => {
            let v = build_v(decomp, &[Q::one()])?;
            if !v.matrix.is_symmetric() {
                return Err(Error::AsymmetricWeights);
            }
            Ok(Semipositivity {
                class_count: 1,
                lower: None,
                upper: None,
                invariants: Vec::new(),
                rays: vec![ExtremeRay {
                    name: "v_1".into(),
                    vector: v.flattened(),
                    params: v.params,
                }],
            })
        }
        2 => two_class_range(decomp),
        n => Err(Error::UnsupportedClassCount(n)),
    }
}

fn two_class_range(decomp: &BisubstDecomposition) -> Result<Semipositivity> {
    let base = build_v(decomp, &[Q::one(), Q::zero()])?.matrix;
    let slope = build_v(decomp, &[Q::zero(), Q::one()])?.matrix;
    if !base.is_symmetric() || !slope.is_symmetric() {
        return Err(Error::AsymmetricWeights);
    }
    let d = base.rows();
    let at = |t: &Q| base.add_scaled(&slope, t);

    // E_j(t) has degree ≤ j ≤ d: interpolate through d + 1 sample points.
    let samples: Vec<(Q, Vec<Q>)> = (0..=d as i64)
        .map(|t| {
            let t = q(t);
            let cp = at(&t).char_poly();
            let e = (1..=d)
                .map(|j| {
                    let c = cp.coeff(d - j);
                    if j % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect();
            (t, e)
        })
        .collect();
    let invariants: Vec<Poly> = (0..d)
        .map(|j| {
            let pts: Vec<(Q, Q)> = samples
                .iter()
                .map(|(t, e)| (t.clone(), e[j].clone()))
                .collect();
            Poly::interpolate(&pts)
        })
        .collect();

    let feasible = |t: &Q| invariants.iter().all(|p| !p.eval(t).is_negative());

    let width = frac(1, ISOLATION_WIDTH);
    let mut candidates: Vec<RealRoot> = invariants
        .iter()
        .filter(|p| p.degree().unwrap_or(0) > 0)
        .flat_map(|p| p.real_roots(&width))
        .collect();
    candidates.sort_by(|a, b| a.lower().cmp(b.lower()));
    // the same irrational root can come from several E_j
    candidates.dedup_by(|b, a| {
        a == b
            || matches!(
                (&*a, &*b),
                (RealRoot::Isolated { .. }, RealRoot::Isolated { .. })
            ) && a.upper() >= b.lower()
    });

    // Walk outwards from t = 1, where v is the all-ones matrix.
    let one = Q::one();
    debug_assert!(feasible(&one));
    let upper = walk(&candidates, &one, &feasible, true);
    let lower = walk(&candidates, &one, &feasible, false);

    let mut rays = Vec::new();
    for (end, sign) in [(&upper, 1), (&lower, -1)] {
        let params = match end {
            Endpoint::Exact(t) => Some(vec![Q::one(), t.clone()]),
            Endpoint::Unbounded => Some(vec![Q::zero(), q(sign)]),
            Endpoint::Algebraic(_) => None,
        };
        if let Some(params) = params {
            let v = build_v(decomp, &params)?;
            rays.push(ExtremeRay {
                name: format!("v_{}", rays.len() + 1),
                vector: v.flattened(),
                params,
            });
        }
    }

    Ok(Semipositivity {
        class_count: 2,
        lower: Some(lower),
        upper: Some(upper),
        invariants,
        rays,
    })
}

/// Last feasible boundary when moving from `start` in one direction. The
/// feasible set is a closed interval and every `E_j` keeps its sign between
/// consecutive candidate roots, so one rational probe per gap decides it.
fn walk(
    candidates: &[RealRoot],
    start: &Q,
    feasible: &dyn Fn(&Q) -> bool,
    upward: bool,
) -> Endpoint {
    let ordered: Vec<&RealRoot> = if upward {
        candidates.iter().filter(|c| c.lower() > start).collect()
    } else {
        candidates
            .iter()
            .rev()
            .filter(|c| c.upper() < start)
            .collect()
    };
    let boundary = |last: Option<&RealRoot>| match last {
        Some(c) => to_endpoint(c),
        None => Endpoint::Exact(start.clone()),
    };
    let mut last: Option<&RealRoot> = None;
    for cand in ordered {
        let (prev_lo, prev_hi) = match last {
            Some(p) => (p.lower(), p.upper()),
            None => (start, start),
        };
        let gap_point = if upward {
            (prev_hi + cand.lower()) / q(2)
        } else {
            (prev_lo + cand.upper()) / q(2)
        };
        if !feasible(&gap_point) {
            return boundary(last);
        }
        if let RealRoot::Exact(t) = cand {
            if !feasible(t) {
                return boundary(last);
            }
        }
        last = Some(cand);
    }
    let beyond = match (last, upward) {
        (Some(c), true) => c.upper() + Q::one(),
        (Some(c), false) => c.lower() - Q::one(),
        (None, true) => start + Q::one(),
        (None, false) => start - Q::one(),
    };
    if feasible(&beyond) {
        Endpoint::Unbounded
    } else {
        boundary(last)
    }
}

fn to_endpoint(r: &RealRoot) -> Endpoint {
    match r {
        RealRoot::Exact(v) => Endpoint::Exact(v.clone()),
        other => Endpoint::Algebraic(other.clone()),
    }
}
