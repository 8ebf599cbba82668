//! Acceptance criteria. Runs as a plain binary and prints one line per
//! criterion; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use slicereg::bloch::{bloch_landau, bloch_radius, BlochParams};
use slicereg::geometry::{is_singular, quotient_eval, real_differential};
use slicereg::landau::{extremal_phi, landau_certify, landau_rho, CoverageParams, LandauParams};
use slicereg::sampling::Sampler;
use slicereg::scan::{ScanParams, Witness};
use slicereg::verify::{run_manifest, FixtureSpec, RunOptions, SuiteManifest, TheoremId, Verdict};
use slicereg::{ImaginaryUnit, Quaternion, SliceSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Coefficients `|aₙ| ≲ scale · decayⁿ`, padded with zeros to `pad` so that
/// derived series (reciprocals) carry enough terms.
fn random_series(s: &mut Sampler, degree: usize, scale: f64, decay: f64, pad: usize) -> SliceSeries {
    let mut c: Vec<Quaternion> = (0..=degree)
        .map(|n| s.quaternion().scale(scale * decay.powi(n as i32) / 2.0))
        .collect();
    c.resize(pad.max(degree + 1), Quaternion::ZERO);
    SliceSeries::new(c, 1.0).unwrap()
}

fn rho_anchor() -> Outcome {
    let err = (landau_rho(0.25).unwrap() - (4.0 - 15f64.sqrt())).abs();
    let mut s = Sampler::new(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = s.uniform(0.0, 1.0);
        if a == 0.0 {
            continue;
        }
        let r = landau_rho(a).unwrap();
        worst = worst.max(((a - r) / (1.0 - a * r) - r).abs());
    }
    outcome(
        err < 1e-14 && worst < 1e-13,
        format!("|rho(1/4) - (4 - sqrt 15)| = {err:.1e} (< 1e-14), worst fixed-point residual {worst:.1e} (< 1e-13)"),
    )
}

fn extremal_anchor() -> Outcome {
    let mut s = Sampler::new(2);
    let mut worst_value: f64 = 0.0;
    let mut worst_deriv: f64 = 0.0;
    for a in [0.1, 0.25, 0.5, 0.9] {
        let u = s.unit_quaternion();
        let rho = landau_rho(a).unwrap();
        let f = extremal_phi(a, u, 0).unwrap();
        let q0 = u.conj().scale(-rho);
        worst_value = worst_value.max((f.eval(q0).unwrap().norm() - rho * rho).abs());
        worst_deriv = worst_deriv.max(f.cullen_derivative().eval(q0).unwrap().norm());
    }
    outcome(
        worst_value < 1e-9 && worst_deriv < 1e-8,
        format!("max ||f(q0)| - rho^2| = {worst_value:.1e} (< 1e-9), max |f'(q0)| = {worst_deriv:.1e} (< 1e-8)"),
    )
}

fn bloch_anchor() -> Outcome {
    let b = bloch_radius();
    let closed = 2.0 * (31.0 - 8.0 * 15f64.sqrt());
    let mut p = BlochParams::default();
    p.landau.coverage.targets = 200;
    let c = match bloch_landau(&SliceSeries::identity(2.0), ImaginaryUnit::I, &p) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("bloch_landau failed: {e}")),
    };
    let pass = (b - closed).abs() < 1e-12
        && (c.covered_radius - closed).abs() < 1e-12
        && b - 1.0 / 31.0 > 0.0
        && c.injectivity_verified
        && c.coverage_verified
        && c.coverage.targets_total == 200;
    outcome(
        pass,
        format!(
            "b = {:.15} (closed form err {:.1e}), b - 1/31 = {:.3e}, injectivity {}, coverage {}/{}",
            c.covered_radius,
            (c.covered_radius - closed).abs(),
            b - 1.0 / 31.0,
            c.injectivity_verified,
            c.coverage.targets_hit,
            c.coverage.targets_total
        ),
    )
}

fn algebra_oracles() -> Outcome {
    let mut s = Sampler::new(4);
    let (mut prod, mut quot, mut inv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut quot_ok = true;
    for _ in 0..200 {
        let f = random_series(&mut s, 6, 0.6, 0.6, 96).add_constant(Quaternion::ONE);
        let g = random_series(&mut s, 8, 1.0, 0.7, 0);
        let q = s.in_ball_radial(0.9);

        let fg = f.star_mul(&g).unwrap();
        prod = prod.max((fg.eval(q).unwrap() - f.star_eval_formula(&g, q).unwrap()).norm());

        let r = f.reciprocal().unwrap();
        let series_route = r.star_mul(&g).unwrap();
        let e = (quotient_eval(&f, &g, q).unwrap() - series_route.eval(q).unwrap()).norm();
        quot = quot.max(e);
        quot_ok &= e < 1e-10 + series_route.tail();

        let one = f.star_mul(&r).unwrap();
        for n in 0..=f.order() {
            let target = if n == 0 { Quaternion::ONE } else { Quaternion::ZERO };
            inv = inv.max((one.coeff(n) - target).norm());
        }
    }
    outcome(
        prod < 1e-11 && quot_ok && inv < 1e-11,
        format!("star_mul vs formula {prod:.1e} (< 1e-11), quotient vs series {quot:.1e} (< 1e-10 + tail), f*f^-* vs 1 {inv:.1e} (< 1e-11)"),
    )
}

fn differential_check() -> Outcome {
    let mut s = Sampler::new(5);
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f = random_series(&mut s, 10, 1.0, 0.8, 0);
        let q = s.in_ball_radial(0.85);
        let d = real_differential(&f, q).unwrap();
        for &e in &basis {
            let fd = (f.eval(q + e.scale(h)).unwrap() - f.eval(q - e.scale(h)).unwrap()).scale(0.5 / h);
            worst = worst.max((d.apply(e) - fd).norm());
        }
    }

    let sq = SliceSeries::from_reals(&[0.0, 0.0, 1.0], 1.0).unwrap();
    let mut mismatches = 0;
    let mut grid = 0;
    for ix in -4..=4 {
        for iy in 0..=4 {
            let x = ix as f64 * 0.2;
            let y = iy as f64 * 0.2;
            if x * x + y * y >= 1.0 {
                continue;
            }
            for unit in [Quaternion::I, Quaternion::J, Quaternion::new(0.0, 0.6, 0.0, 0.8)] {
                let q = Quaternion::real(x) + unit.scale(y);
                grid += 1;
                if is_singular(&sq, q, None).unwrap() != (ix == 0) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        worst < 1e-5 && mismatches == 0,
        format!("max differential vs finite difference {worst:.1e} (< 1e-5), q^2 singular-set mismatches {mismatches}/{grid}"),
    )
}

fn schwarz_pick_suites() -> Outcome {
    let report = match run_manifest(&SuiteManifest::default_suite(), &RunOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("suite error: {e}")),
    };
    let mut lines = Vec::new();
    let mut pass = true;
    let mut covered = std::collections::HashSet::new();
    for e in &report.entries {
        let r = &e.report;
        covered.insert(r.theorem_id);
        pass &= r.verdict == Verdict::Pass && e.entry.seeds >= 20 && e.entry.samples >= 500;
        if let FixtureSpec::Moebius { .. } = e.entry.fixture {
            pass &= r.worst_slack.abs() < 1e-8;
        }
        lines.push(format!(
            "{:?}/{} {:?} {:.1e}",
            r.theorem_id,
            kind(&e.entry.fixture),
            r.verdict,
            r.worst_slack
        ));
    }
    pass &= covered.len() == 4;
    pass &= report
        .entries
        .iter()
        .any(|e| e.report.theorem_id == TheoremId::VariantNoninjective && e.runs == 3 * e.entry.seeds);
    outcome(pass, lines.join("; "))
}

fn kind(f: &FixtureSpec) -> &'static str {
    match f {
        FixtureSpec::Generated { .. } => "generated",
        FixtureSpec::Moebius { .. } => "moebius",
        FixtureSpec::Phi { .. } => "phi",
        FixtureSpec::Rotation { .. } => "rotation",
    }
}

fn landau_extremal() -> Outcome {
    let a = 0.5;
    let rho = landau_rho(a).unwrap();
    let f = extremal_phi(a, Quaternion::new(0.5, -0.5, 0.5, 0.5), 0).unwrap();
    let p = LandauParams {
        scan: ScanParams {
            shells: 999,
            ..ScanParams::default()
        },
        coverage: CoverageParams {
            targets: 500,
            ..CoverageParams::default()
        },
        ..LandauParams::default()
    };
    let (inj, cov) = match landau_certify(&f, &p) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("landau_certify failed: {e}")),
    };
    let gap = inj.upper_bound - inj.lower_bound;
    let boundary = inj
        .witness
        .map_or(f64::INFINITY, |w: Witness| (w.value().norm() - rho * rho).abs());
    let pass = (inj.grid_resolution - 1e-3).abs() < 1e-12
        && gap < 1e-3
        && cov.targets_total == 500
        && cov.complete()
        && (cov.target_radius - 0.99 * rho * rho).abs() < 1e-15
        && boundary < 1e-6;
    outcome(
        pass,
        format!(
            "upper - lower = {gap:.1e} (< 1e-3, grid {:.0e}), coverage {}/{}, ||f(q0)| - rho^2| = {boundary:.1e} (< 1e-6)",
            inj.grid_resolution, cov.targets_hit, cov.targets_total
        ),
    )
}

fn mutation_canary() -> Outcome {
    match run_manifest(&SuiteManifest::canary(), &RunOptions::default()) {
        Ok(r) => outcome(
            r.any_failed(),
            format!(
                "perturbed fixture verdict {:?}, worst slack {:.1e}",
                r.entries[0].report.verdict, r.entries[0].report.worst_slack
            ),
        ),
        Err(e) => outcome(false, format!("canary error: {e}")),
    }
}

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("landau radius anchor", 1, rho_anchor),
        ("extremal critical point", 1, extremal_anchor),
        ("bloch constant on the identity", 30, bloch_anchor),
        ("algebra oracle equivalence", 10, algebra_oracles),
        ("real differential and singular set", 5, differential_check),
        ("schwarz-pick suites, 20 seeds x 500 samples", 120, schwarz_pick_suites),
        ("landau certificate on the extremal", 60, landau_extremal),
        ("mutation canary", 60, mutation_canary),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let elapsed = t.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "[{}] {}. {}: {} [{:.2}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            name,
            o.detail,
            elapsed.as_secs_f64(),
            limit
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
