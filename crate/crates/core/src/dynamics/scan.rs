use rayon::prelude::*;

use super::maps::intermediate_from_factors;
use super::{rate_integral, DynamicsOptions, ModelKind, RateProfile};
use crate::channels::choi_from_superop;
use crate::charfunc::{gram_matrix, UnitaryBasis};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform time grid `t_k = k·t_max/(n−1)` and all pairs `t ≥ s` on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanGrid<T> {
    t_max: T,
    n_points: usize,
}

impl<T: Real> ScanGrid<T> {
    pub fn new(t_max: T, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!("scan grid needs >= 2 points, got {n_points}")));
        }
        if !(t_max > T::zero()) || !t_max.is_finite() {
            return Err(Error::InvalidParameter(format!("scan grid needs a positive t_max, got {t_max}")));
        }
        Ok(Self { t_max, n_points })
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> T {
        self.t_max / T::from_usize(self.n_points - 1).expect("grid size")
    }

    pub fn time(&self, k: usize) -> T {
        if k + 1 == self.n_points {
            self.t_max
        } else {
            self.spacing() * T::from_usize(k).expect("index")
        }
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.n_points).map(|k| self.time(k)).collect()
    }

    /// `(t_index, s_index)` with `t_index ≥ s_index`, ordered by `t` then `s`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_points).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFlag {
    Ok,
    /// Gram matrix below `-tol`: the intermediate map is not CP.
    NonCp,
    /// `Φ(s, 0)` could not be inverted; values are NaN.
    Singular,
}

impl PairFlag {
    pub fn name(self) -> &'static str {
        match self {
            PairFlag::Ok => "ok",
            PairFlag::NonCp => "non_cp",
            PairFlag::Singular => "singular_map",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairRecord<T> {
    pub t_index: usize,
    pub s_index: usize,
    pub t: T,
    pub s: T,
    /// Ratio of decay factors `f(t)/f(s)`.
    pub r: T,
    /// Smallest eigenvalue of `J(Φ(t, s))`.
    pub choi_min: T,
    /// Smallest eigenvalue of `G^{(t, s)}`.
    pub gram_min: T,
    pub flag: PairFlag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisibilityReport<T> {
    pub model: ModelKind,
    pub tol: T,
    /// One record per grid pair, in [`ScanGrid::pairs`] order.
    pub records: Vec<PairRecord<T>>,
    /// `(t_index, s_index)` of every pair with `gram_min < -tol`.
    pub violating_pairs: Vec<(usize, usize)>,
}

impl<T: Real> DivisibilityReport<T> {
    pub fn is_cp_divisible(&self) -> bool {
        self.violating_pairs.is_empty()
    }

    pub fn singular_count(&self) -> usize {
        self.records.iter().filter(|r| r.flag == PairFlag::Singular).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions<T> {
    pub tol: T,
    /// Worker threads; 0 evaluates pairs sequentially on the caller's thread.
    pub threads: usize,
    pub dynamics: DynamicsOptions<T>,
}

impl<T: Real> Default for ScanOptions<T> {
    fn default() -> Self {
        Self { tol: T::default_tol(), threads: 0, dynamics: DynamicsOptions::default() }
    }
}

/// Decay factor of the model at every grid time, from a cumulative rate integral.
fn grid_factors<T: Real>(model: ModelKind, p: &RateProfile<T>, times: &[T], quad_tol: T) -> Result<Vec<T>> {
    let segment_tol = quad_tol / T::from_usize(times.len().max(2) - 1).expect("grid size");
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(times.len());
    let mut prev = T::zero();
    for &t in times {
        acc = acc + rate_integral(prev, t, p, segment_tol)?;
        prev = t;
        out.push(model.decay_factor((-acc).exp()));
    }
    Ok(out)
}

fn evaluate_pair<T: Real>(
    model: ModelKind,
    grid: &ScanGrid<T>,
    factors: &[T],
    basis: &UnitaryBasis<T>,
    opts: &ScanOptions<T>,
    (i, j): (usize, usize),
) -> Result<PairRecord<T>> {
    let (t, s) = (grid.time(i), grid.time(j));
    let nan = T::nan();
    let map = match intermediate_from_factors(model, factors[i], factors[j], &opts.dynamics) {
        Ok(map) => map,
        Err(Error::SingularMap { .. }) => {
            return Ok(PairRecord {
                t_index: i,
                s_index: j,
                t,
                s,
                r: nan,
                choi_min: nan,
                gram_min: nan,
                flag: PairFlag::Singular,
            })
        }
        Err(e) => return Err(e),
    };
    let j_op = choi_from_superop(&map.general);
    let choi_min = j_op.min_eigenvalue()?;
    let gram_min = gram_matrix(&j_op, basis)?.min_eigenvalue();
    let flag = if gram_min < -opts.tol { PairFlag::NonCp } else { PairFlag::Ok };
    Ok(PairRecord { t_index: i, s_index: j, t, s, r: map.ratio, choi_min, gram_min, flag })
}

/// Checks `G^{(t,s)} ⪰ 0` for every grid pair `t ≥ s`.
///
/// Pairs whose `Φ(s, 0)` cannot be inverted are recorded with
/// [`PairFlag::Singular`] and do not abort the scan. Records come back in
/// grid order whatever the thread count.
pub fn cp_divisibility_scan<T: Real>(
    model: ModelKind,
    p: &RateProfile<T>,
    grid: &ScanGrid<T>,
    basis: &UnitaryBasis<T>,
    opts: &ScanOptions<T>,
) -> Result<DivisibilityReport<T>> {
    if basis.space_dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: "basis on the 4-dimensional doubled qubit space".into(),
            found: format!("basis on dimension {}", basis.space_dim()),
        });
    }
    let times = grid.times();
    let factors = grid_factors(model, p, &times, opts.dynamics.quad_tol)?;
    let pairs = grid.pairs();
    let eval = |&pair: &(usize, usize)| evaluate_pair(model, grid, &factors, basis, opts, pair);

    let records: Vec<PairRecord<T>> = if opts.threads == 0 {
        pairs.iter().map(eval).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| pairs.par_iter().map(eval).collect::<Result<_>>())?
    };
    let violating_pairs =
        records.iter().filter(|r| r.flag == PairFlag::NonCp).map(|r| (r.t_index, r.s_index)).collect();
    Ok(DivisibilityReport { model, tol: opts.tol, records, violating_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfunc::pauli_basis;

    #[test]
    fn grid_counts() {
        let g = ScanGrid::new(1.0, 2).unwrap();
        assert_eq!(g.pairs(), vec![(0, 0), (1, 0), (1, 1)]);
        let g = ScanGrid::new(6.0f64, 121).unwrap();
        assert_eq!(g.pairs().len(), 121 * 122 / 2);
        assert_eq!(g.times()[120], 6.0);
        assert!((g.spacing() - 0.05).abs() < 1e-15);
        assert!(ScanGrid::new(1.0, 1).is_err());
        assert!(ScanGrid::new(0.0, 5).is_err());
    }

    #[test]
    fn markovian_profile_has_no_violations() {
        let p = RateProfile::constant(0.2).unwrap();
        let basis = pauli_basis(2).unwrap();
        let g = ScanGrid::new(6.0, 25).unwrap();
        for model in [ModelKind::AmplitudeDamping, ModelKind::PureDephasing] {
            let report = cp_divisibility_scan(model, &p, &g, &basis, &ScanOptions::default()).unwrap();
            assert!(report.is_cp_divisible());
            assert_eq!(report.singular_count(), 0);
        }
    }

    #[test]
    fn negative_window_pairs_violate_and_signs_agree() {
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        let basis = pauli_basis(2).unwrap();
        let g = ScanGrid::new(6.0, 41).unwrap();
        let report = cp_divisibility_scan(ModelKind::AmplitudeDamping, &p, &g, &basis, &ScanOptions::default()).unwrap();
        // t = 0.9, s = 0.6 lie inside the window where γ < 0
        let (i, j) = (6, 4);
        assert!(report.violating_pairs.contains(&(i, j)));
        for r in &report.records {
            assert_eq!(r.choi_min < -1e-10, r.gram_min < -1e-10, "{r:?}");
        }
    }

    #[test]
    fn singular_pairs_are_flagged_not_fatal() {
        let p = RateProfile::constant(10.0f64).unwrap();
        let basis = pauli_basis(2).unwrap();
        let g = ScanGrid::new(4.0, 5).unwrap();
        let report = cp_divisibility_scan(ModelKind::AmplitudeDamping, &p, &g, &basis, &ScanOptions::default()).unwrap();
        assert!(report.singular_count() > 0);
        let bad = report.records.iter().find(|r| r.flag == PairFlag::Singular).unwrap();
        assert!(bad.gram_min.is_nan());
        assert!(report.violating_pairs.is_empty());
    }

    #[test]
    fn thread_count_does_not_change_report() {
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        let basis = pauli_basis(2).unwrap();
        let g = ScanGrid::new(3.0, 21).unwrap();
        let seq = cp_divisibility_scan(ModelKind::PureDephasing, &p, &g, &basis, &ScanOptions::default()).unwrap();
        let par = cp_divisibility_scan(
            ModelKind::PureDephasing,
            &p,
            &g,
            &basis,
            &ScanOptions { threads: 4, ..ScanOptions::default() },
        )
        .unwrap();
        assert_eq!(seq, par);
    }
}
