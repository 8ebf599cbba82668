//! Inequality checks for regular self-maps of the unit ball over sampled
//! points, each producing a [`CheckReport`], and a manifest runner that
//! drives them over seeded fixtures.
//!
//! Left-hand sides such as `|(f − v) * (1 − v̄ * f)^{-*}|` are evaluated with
//! the pointwise product and quotient formulas, so the only truncation that
//! enters a budget is the tail of the fixture itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{star_product_pointwise, RegularFn};
use crate::landau::{certify_self_map, extremal_phi, generate_self_map, landau_rho, minmax_bounds};
use crate::moebius::{default_order, regular_eval, regular_moebius_series, MoebiusSpec};
use crate::quaternion::Quaternion;
use crate::sampling::Sampler;
use crate::scan::{injectivity_scan, ScanParams};
use crate::series::{SliceSeries, DEFAULT_MAX_ORDER};

/// Absolute slack granted to floating-point evaluation on top of tails.
pub const ROUNDING_FLOOR: f64 = 1e-12;

/// Normalized slack below which a minmax bound counts as attained.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Equality detection looks at `EQUALITY_MIN_RADIUS ≤ |q| ≤ EQUALITY_MAX_RADIUS`.
const EQUALITY_MIN_RADIUS: f64 = 0.05;
const EQUALITY_MAX_RADIUS: f64 = 0.95;

const SAMPLE_RADIUS: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    SchwarzPick,
    VariantNoninjective,
    Globaltolocal,
    Minmax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem_id: TheoremId,
    pub samples: usize,
    /// Minimum of right-hand side minus left-hand side.
    pub worst_slack: f64,
    pub truncation_budget: f64,
    pub verdict: Verdict,
    /// Where `worst_slack` was attained.
    pub worst_point: Option<Quaternion>,
    /// A minmax bound is attained (within [`EQUALITY_TOL`]).
    pub equality_detected: bool,
    /// The fixture passed the boundary self-map sweep. Checks run regardless.
    pub hypothesis_ok: bool,
}

impl CheckReport {
    fn new(
        theorem_id: TheoremId,
        samples: usize,
        worst: (f64, Option<Quaternion>),
        budget: f64,
        hypothesis_ok: bool,
    ) -> Self {
        let verdict = if !budget.is_finite() {
            Verdict::Inconclusive
        } else if worst.0 > -budget {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckReport {
            theorem_id,
            samples,
            worst_slack: worst.0,
            truncation_budget: budget,
            verdict,
            worst_point: worst.1,
            equality_detected: false,
            hypothesis_ok,
        }
    }

    fn inconclusive(theorem_id: TheoremId, samples: usize, budget: f64, hypothesis_ok: bool) -> Self {
        CheckReport {
            theorem_id,
            samples,
            worst_slack: f64::INFINITY,
            truncation_budget: budget,
            verdict: Verdict::Inconclusive,
            worst_point: None,
            equality_detected: false,
            hypothesis_ok,
        }
    }
}

fn worst_of(slacks: impl IntoIterator<Item = (f64, Quaternion)>) -> (f64, Option<Quaternion>) {
    slacks.into_iter().fold(
        (f64::INFINITY, None),
        |acc, (s, q)| if s < acc.0 { (s, Some(q)) } else { acc },
    )
}

fn sample_points(n: usize, radius: f64, seed: u64) -> Vec<Quaternion> {
    let mut s = Sampler::new(seed);
    (0..n).map(|_| s.in_ball_radial(radius)).collect()
}

fn self_map_ok(f: &SliceSeries, seed: u64) -> bool {
    certify_self_map(f, 0.97, 500, seed).is_ok_and(|c| c.ok)
}

/// `(f − v) * (1 − v̄ * f)^{-*}` with `v = f(q0)`, as a series truncated at the
/// order of `f`.
pub fn build_schwarz_numerator(f: &SliceSeries, q0: Quaternion) -> Result<SliceSeries> {
    let v = f.eval(q0)?;
    let num = f.add_constant(-v);
    let den = f.left_mul(-v.conj()).add_constant(Quaternion::ONE);
    let order = f.order().min(DEFAULT_MAX_ORDER);
    num.star_mul_truncated(&den.reciprocal()?, order)
}

/// Pointwise evaluation of `(f − v) * (1 − v̄ * f)^{-*}`.
struct SchwarzTransform<'a> {
    f: &'a SliceSeries,
    w: SliceSeries,
    wc: SliceSeries,
    v: Quaternion,
}

impl<'a> SchwarzTransform<'a> {
    fn new(f: &'a SliceSeries, v: Quaternion) -> Self {
        // coefficients −v̄aₙ: left constants do not factor out pointwise
        let w = f.left_mul(-v.conj()).add_constant(Quaternion::ONE);
        SchwarzTransform {
            f,
            wc: w.conjugate(),
            w,
            v,
        }
    }

    /// `w^{-*}(x) = w(T_w(x))⁻¹` for `w = 1 − v̄ * f`.
    fn reciprocal_at(&self, x: Quaternion) -> Result<Quaternion> {
        let y = x.conjugate_by(self.wc.eval(x)?)?;
        self.w.eval(y)?.inverse()
    }

    fn value(&self, q: Quaternion) -> Result<Quaternion> {
        self.star_with_reciprocal(self.f.eval(q)? - self.v, q)
    }

    /// `(h * w^{-*})(q)` given `h(q)`.
    fn star_with_reciprocal(&self, hq: Quaternion, q: Quaternion) -> Result<Quaternion> {
        // below the inversion threshold the rotation is irrelevant at this magnitude
        let x = if hq.norm() > crate::DEFAULT_EPS {
            q.conjugate_by(hq)?
        } else {
            q
        };
        Ok(hq * self.reciprocal_at(x)?)
    }

    /// Perturbing `f` by at most `t` moves the value by at most this much.
    fn budget(&self) -> f64 {
        let k = 1.0 - self.v.norm();
        ROUNDING_FLOOR + 4.0 * self.f.tail() / (k * k)
    }
}

/// Slacks of the two derivative inequalities at `q0`; the second only for
/// nonreal `q0`.
pub fn schwarz_pick_derivative_slacks(f: &SliceSeries, q0: Quaternion) -> Result<(f64, Option<f64>)> {
    let v = f.eval(q0)?;
    let t = SchwarzTransform::new(f, v);
    let d = f.cullen_derivative().eval(q0)?;
    let lhs = t.star_with_reciprocal(d, q0)?.norm();
    let cullen = 1.0 / (1.0 - q0.norm_sqr()) - lhs;
    if q0.slice_decompose().y <= 1e-8 {
        return Ok((cullen, None));
    }
    let ds = f.spherical_derivative_at(q0)?;
    let fs = f.star_eval_formula(&f.conjugate(), q0)?;
    let lhs = ds.norm() / (Quaternion::ONE - fs).norm();
    let rhs = 1.0 / (Quaternion::ONE - q0.conj() * q0.conj()).norm();
    Ok((cullen, Some(rhs - lhs)))
}

pub fn check_schwarz_pick(f: &SliceSeries, q0: Quaternion, n_samples: usize, seed: u64) -> Result<CheckReport> {
    let v = f.eval(q0)?;
    let t = SchwarzTransform::new(f, v);
    let radius = SAMPLE_RADIUS * f.radius().min(1.0);
    let pts = sample_points(n_samples, radius, seed);
    let slacks: Vec<(f64, Quaternion)> = pts
        .par_iter()
        .map(|&q| Ok((regular_eval(q0, q)?.norm() - t.value(q)?.norm(), q)))
        .collect::<Result<_>>()?;
    let (cullen, spherical) = schwarz_pick_derivative_slacks(f, q0)?;
    let mut all = slacks;
    all.push((cullen, q0));
    if let Some(s) = spherical {
        all.push((s, q0));
    }
    Ok(CheckReport::new(
        TheoremId::SchwarzPick,
        n_samples,
        worst_of(all),
        t.budget(),
        self_map_ok(f, seed),
    ))
}

/// `p0 = (1 − q1 q0)⁻¹ q1 (1 − q1 q0)`.
pub fn variant_p0(q0: Quaternion, q1: Quaternion) -> Result<Quaternion> {
    q1.conjugate_by(Quaternion::ONE - q1 * q0)
}

/// `f = v + (q − q0) * (q − q1) * g`, with `g` rescaled so that the ℓ¹ norm
/// of the non-constant part is at most `0.9 (1 − |v|)`; `f` is then a self-map.
pub fn build_variant_fixture(q0: Quaternion, q1: Quaternion, v: Quaternion, g: &SliceSeries) -> Result<SliceSeries> {
    if !(v.norm() < 1.0) {
        return Err(Error::Invalid(format!("value {v} must lie in the unit ball")));
    }
    let r = g.radius();
    let h = SliceSeries::linear(q0, r)
        .star_mul(&SliceSeries::linear(q1, r))?
        .star_mul(g)?;
    let norm = h.l1_norm() + h.tail();
    if norm == 0.0 {
        return Err(Error::Invalid("cofactor g vanishes".into()));
    }
    let scale = (0.9 * (1.0 - v.norm()) / norm).min(1.0);
    Ok(h.left_mul(Quaternion::real(scale)).add_constant(v))
}

pub fn check_variant_noninjective(
    f: &SliceSeries,
    q0: Quaternion,
    q1: Quaternion,
    v: Quaternion,
    n_samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let t = SchwarzTransform::new(f, v);
    let p0 = variant_p0(q0, q1)?;
    let radius = SAMPLE_RADIUS * f.radius().min(1.0);
    let pts = sample_points(n_samples, radius, seed);
    let slacks: Vec<(f64, Quaternion)> = pts
        .par_iter()
        .map(|&q| {
            let rhs = star_product_pointwise(|x| regular_eval(q0, x), |x| regular_eval(p0, x), q)?.norm();
            Ok((rhs - t.value(q)?.norm(), q))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new(
        TheoremId::VariantNoninjective,
        n_samples,
        worst_of(slacks),
        t.budget(),
        self_map_ok(f, seed),
    ))
}

fn origin_hypotheses(f: &SliceSeries) -> Option<f64> {
    let a = f.coeff(1).norm();
    (f.coeff(0).norm() <= 1e-12 && a > 0.0 && a < 1.0).then_some(a)
}

/// For every collision `f(q) = f(q′) = v` or singular point found by the
/// scan, `|v| ≤ |q| |q′|`; and no witness lies inside `B(0, ρ(a))` beyond
/// the grid resolution.
pub fn check_globaltolocal(f: &SliceSeries, scan: &ScanParams) -> Result<CheckReport> {
    let hyp = self_map_ok(f, scan.seed);
    let budget = ROUNDING_FLOOR + f.tail();
    let Some(a) = origin_hypotheses(f) else {
        return Ok(CheckReport::inconclusive(TheoremId::Globaltolocal, 0, budget, false));
    };
    let rho = landau_rho(a)?;
    let mut p = *scan;
    p.r_max = p.r_max.min(SAMPLE_RADIUS * f.radius().min(1.0));
    let out = injectivity_scan(&RegularFn::new(f.clone()), &p);
    if out.witnesses.is_empty() {
        return Ok(CheckReport::inconclusive(TheoremId::Globaltolocal, 0, budget, hyp));
    }
    let mut slacks: Vec<(f64, Quaternion)> = Vec::new();
    let mut gap: f64 = 0.0;
    for w in &out.witnesses {
        let point = match w {
            crate::scan::Witness::Singular { point, .. } => *point,
            crate::scan::Witness::Collision { q, gap: g, .. } => {
                gap = gap.max(*g);
                *q
            }
        };
        slacks.push((w.modulus_product() - w.value().norm(), point));
    }
    let best = out.best().expect("nonempty");
    let shell = best.radius() - (rho - out.resolution);
    slacks.push((shell, Quaternion::real(best.radius())));
    Ok(CheckReport::new(
        TheoremId::Globaltolocal,
        out.witnesses.len(),
        worst_of(slacks),
        budget + gap,
        hyp,
    ))
}

/// `(|f(q)| − lower, upper − |f(q)|)` at `q`.
fn minmax_slacks(f: &SliceSeries, a: f64, q: Quaternion) -> Result<(f64, f64)> {
    let r = q.norm();
    let (lo, hi) = minmax_bounds(a, r);
    let m = f.eval(q)?.norm();
    Ok((m - lo, hi - m))
}

/// Minmax slack scaled by `r²(1 − r)`: both sides vanish to second order at
/// the origin and, for inner functions, to first order at the boundary.
fn normalized_minmax_slack(f: &SliceSeries, a: f64, q: Quaternion) -> f64 {
    let r = q.norm();
    if !(EQUALITY_MIN_RADIUS..=EQUALITY_MAX_RADIUS).contains(&r) {
        return f64::INFINITY;
    }
    match minmax_slacks(f, a, q) {
        Ok((lo, hi)) => lo.min(hi) / (r * r * (1.0 - r)),
        Err(_) => f64::INFINITY,
    }
}

/// Pattern search in ℝ⁴ for the smallest normalized minmax slack.
fn refine_equality(f: &SliceSeries, a: f64, start: Quaternion) -> f64 {
    let dirs = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let mut q = start;
    let mut best = normalized_minmax_slack(f, a, q);
    let mut step = 0.02;
    let mut evals = 0;
    while step > 1e-9 && evals < 20_000 {
        let mut moved = false;
        for d in dirs {
            for sign in [1.0, -1.0] {
                let cand = q + d.scale(sign * step);
                let val = normalized_minmax_slack(f, a, cand);
                evals += 1;
                if val < best {
                    (q, best) = (cand, val);
                    moved = true;
                }
            }
        }
        // expanding after a success lets the search follow curved valleys
        step = if moved { (2.0 * step).min(0.05) } else { 0.5 * step };
    }
    best
}

pub fn check_minmax(f: &SliceSeries, n_samples: usize, seed: u64) -> Result<CheckReport> {
    let budget = ROUNDING_FLOOR + f.tail();
    let hyp = self_map_ok(f, seed);
    let Some(a) = origin_hypotheses(f) else {
        return Ok(CheckReport::inconclusive(TheoremId::Minmax, n_samples, budget, false));
    };
    let radius = SAMPLE_RADIUS * f.radius().min(1.0);
    let pts = sample_points(n_samples, radius, seed);
    let slacks: Vec<(f64, f64, Quaternion)> = pts
        .par_iter()
        .map(|&q| minmax_slacks(f, a, q).map(|(lo, hi)| (lo, hi, q)))
        .collect::<Result<_>>()?;
    let worst = worst_of(slacks.iter().map(|&(lo, hi, q)| (lo.min(hi), q)));
    let mut report = CheckReport::new(TheoremId::Minmax, n_samples, worst, budget, hyp);

    let mut starts: Vec<(f64, usize, Quaternion)> = slacks
        .iter()
        .enumerate()
        .map(|(i, s)| (normalized_minmax_slack(f, a, s.2), i, s.2))
        .filter(|s| s.0.is_finite())
        .collect();
    starts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let refined = starts
        .par_iter()
        .take(8)
        .map(|s| refine_equality(f, a, s.2))
        .reduce(|| f64::INFINITY, f64::min);
    report.equality_detected = refined < EQUALITY_TOL;
    Ok(report)
}

// ---------------------------------------------------------------------------
// manifests

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureSpec {
    /// `q * 𝓜_{p₁} * … * 𝓜_{p_k} * u`.
    Generated { k: usize, order: usize },
    /// `𝓜_{q₀} u` with `|q₀| < 0.6`.
    Moebius {
        #[serde(default)]
        order: usize,
    },
    /// `Φ_u` for the given `a`.
    Phi {
        a: f64,
        #[serde(default)]
        order: usize,
    },
    /// `q a u`.
    Rotation { a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub index: usize,
    pub amount: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Conjugate,
    Same,
    Random,
    All,
}

fn default_seeds() -> usize {
    20
}

fn default_samples() -> usize {
    500
}

fn default_placement() -> Placement {
    Placement::All
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub theorem_id: TheoremId,
    pub fixture: FixtureSpec,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub mutation: Option<Mutation>,
    /// Where `q1` goes relative to `q0` in the non-injective variant.
    #[serde(default = "default_placement")]
    pub placement: Placement,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteManifest {
    /// All four suites over 20 seeds.
    pub fn default_suite() -> Self {
        let entry = |theorem_id, fixture| SuiteEntry {
            theorem_id,
            fixture,
            seeds: default_seeds(),
            samples: default_samples(),
            base_seed: 0,
            mutation: None,
            placement: Placement::All,
        };
        let generated = FixtureSpec::Generated { k: 2, order: 96 };
        SuiteManifest {
            entries: vec![
                entry(TheoremId::SchwarzPick, generated),
                entry(TheoremId::SchwarzPick, FixtureSpec::Moebius { order: 0 }),
                entry(TheoremId::VariantNoninjective, generated),
                entry(TheoremId::Minmax, generated),
                entry(TheoremId::Minmax, FixtureSpec::Phi { a: 0.5, order: 0 }),
                entry(TheoremId::Globaltolocal, generated),
                entry(TheoremId::Globaltolocal, FixtureSpec::Phi { a: 0.5, order: 0 }),
            ],
        }
    }

    /// The Möbius Schwarz–Pick suite with one coefficient perturbed by 0.05.
    pub fn canary() -> Self {
        SuiteManifest {
            entries: vec![SuiteEntry {
                theorem_id: TheoremId::SchwarzPick,
                fixture: FixtureSpec::Moebius { order: 0 },
                seeds: default_seeds(),
                samples: default_samples(),
                base_seed: 0,
                mutation: Some(Mutation { index: 1, amount: 0.05 }),
                placement: Placement::All,
            }],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub scan: ScanParams,
    /// Order cap for generated fixtures.
    pub max_order: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            scan: ScanParams {
                shells: 100,
                points_per_sphere: 16,
                collision_shells: 12,
                collision_points: 8,
                ..ScanParams::default()
            },
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub entry: SuiteEntry,
    /// Per-seed reports reduced to one: the verdict is `fail` if any seed
    /// fails, the slack and budget are those of the tightest seed.
    pub report: CheckReport,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub entries: Vec<EntryReport>,
}

impl SuiteReport {
    pub fn any_failed(&self) -> bool {
        self.entries.iter().any(|e| e.report.verdict == Verdict::Fail)
    }
}

/// The fixture for one seed, after any mutation.
pub fn build_fixture(
    spec: &FixtureSpec,
    seed: u64,
    mutation: Option<Mutation>,
    max_order: usize,
) -> Result<SliceSeries> {
    let mut s = Sampler::new(seed ^ 0xF1C5);
    let f = match *spec {
        FixtureSpec::Generated { k, order } => generate_self_map(seed, k, order.min(max_order))?,
        FixtureSpec::Moebius { order } => {
            let spec = MoebiusSpec::regular(s.center(0.6), s.unit_quaternion())?;
            let order = if order == 0 { default_order(0.6) } else { order };
            regular_moebius_series(&spec, order.min(max_order))?
        }
        FixtureSpec::Phi { a, order } => extremal_phi(a, s.unit_quaternion(), order.min(max_order))?,
        FixtureSpec::Rotation { a } => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Invalid(format!("rotation factor {a} must lie in (0, 1]")));
            }
            SliceSeries::identity(1.0).right_mul(s.unit_quaternion().scale(a))
        }
    };
    Ok(match mutation {
        Some(m) => mutate(&f, m),
        None => f,
    })
}

/// Adds `amount` to coefficient `index` along its own direction (along 1
/// if it vanishes), enlarging its modulus.
pub fn mutate(f: &SliceSeries, m: Mutation) -> SliceSeries {
    let a = f.coeff(m.index);
    let dir = if a.norm() > 0.0 {
        a.scale(1.0 / a.norm())
    } else {
        Quaternion::ONE
    };
    let mut c = f.coeffs().to_vec();
    if c.len() <= m.index {
        c.resize(m.index + 1, Quaternion::ZERO);
    }
    c[m.index] += dir.scale(m.amount);
    SliceSeries::new(c, f.radius())
        .expect("finite coefficients")
        .with_tail(f.tail())
}

fn run_seed(entry: &SuiteEntry, seed: u64, opts: &RunOptions) -> Result<Vec<CheckReport>> {
    let f = build_fixture(&entry.fixture, seed, entry.mutation, opts.max_order)?;
    let mut s = Sampler::new(seed ^ 0x0A11);
    let n = entry.samples;
    Ok(match entry.theorem_id {
        TheoremId::SchwarzPick => vec![check_schwarz_pick(&f, s.in_ball_radial(0.9), n, seed)?],
        TheoremId::Minmax => vec![check_minmax(&f, n, seed)?],
        TheoremId::Globaltolocal => {
            let scan = ScanParams { seed, ..opts.scan };
            vec![check_globaltolocal(&f, &scan)?]
        }
        TheoremId::VariantNoninjective => {
            let placements = match entry.placement {
                Placement::All => vec![Placement::Conjugate, Placement::Same, Placement::Random],
                p => vec![p],
            };
            let mut out = Vec::new();
            for p in placements {
                let q0 = s.in_ball_radial(0.8);
                let q1 = match p {
                    Placement::Conjugate => q0.conj(),
                    Placement::Same => q0,
                    _ => s.in_ball_radial(0.8),
                };
                let v = s.in_ball_radial(0.7);
                // the fixture supplies the cofactor g
                let g = f.truncate_to(f.order().min(24)).add_constant(Quaternion::ONE);
                let h = build_variant_fixture(q0, q1, v, &g)?;
                let h = match entry.mutation {
                    Some(m) => mutate(&h, m),
                    None => h,
                };
                out.push(check_variant_noninjective(&h, q0, q1, v, n, seed)?);
            }
            out
        }
    })
}

fn reduce(theorem_id: TheoremId, reports: &[CheckReport]) -> CheckReport {
    let verdict = if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let decided = reports.iter().filter(|r| r.verdict != Verdict::Inconclusive);
    let tightest =
        decided.min_by(|a, b| (a.worst_slack + a.truncation_budget).total_cmp(&(b.worst_slack + b.truncation_budget)));
    let (worst_slack, truncation_budget, worst_point) = tightest.map_or((f64::INFINITY, 0.0, None), |r| {
        (r.worst_slack, r.truncation_budget, r.worst_point)
    });
    CheckReport {
        theorem_id,
        samples: reports.iter().map(|r| r.samples).sum(),
        worst_slack,
        truncation_budget,
        verdict,
        worst_point,
        equality_detected: reports.iter().any(|r| r.equality_detected),
        hypothesis_ok: reports.iter().all(|r| r.hypothesis_ok),
    }
}

pub fn run_entry(entry: &SuiteEntry, opts: &RunOptions) -> Result<EntryReport> {
    let mut reports = Vec::new();
    for k in 0..entry.seeds {
        reports.extend(run_seed(entry, entry.base_seed + k as u64, opts)?);
    }
    Ok(EntryReport {
        entry: entry.clone(),
        report: reduce(entry.theorem_id, &reports),
        runs: reports.len(),
    })
}

pub fn run_manifest(m: &SuiteManifest, opts: &RunOptions) -> Result<SuiteReport> {
    let entries = m.entries.iter().map(|e| run_entry(e, opts)).collect::<Result<_>>()?;
    Ok(SuiteReport { entries })
}
