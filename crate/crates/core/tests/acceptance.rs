//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero when any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use expmoment::expcore::{self, SeriesCoeffs};
use expmoment::hankel::{self, CheckOptions, HankelForm, HankelMatrix, Region};
use expmoment::measures::{self, AtomicMeasure, Domain, Measure, MomentSequence};
use expmoment::numerics::{exact_det, factorial, rat, ratio};
use expmoment::recover;
use expmoment::{Frequencies, Rational, Stage};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spread_values(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(lo..=hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

fn random_order(rng: &mut ChaCha8Rng) -> usize {
    [1, 3, 5][rng.random_range(0..3)]
}

/// `Σ_i λ_i^p e^{λ_i x} / Π_{j≠i}(λ_i − λ_j)`, straight from the partial
/// fraction form.
fn phi_oracle(lambda: &[f64], p: usize, x: f64) -> f64 {
    lambda
        .iter()
        .enumerate()
        .map(|(i, li)| {
            let w: f64 = lambda.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, lj)| li - lj).product();
            li.powi(p as i32) * (li * x).exp() / w
        })
        .sum()
}

fn basis_oracle(lambda: &[f64], x: f64) -> Vec<f64> {
    let n = lambda.len() - 1;
    (0..=n).map(|j| (1..=j).map(|k| k as f64).product::<f64>() * phi_oracle(lambda, n - j, x)).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = random_order(&mut rng);
        let lambda = spread_values(&mut rng, n + 1, 1e-3, 10.0, 0.05);
        let freq = Frequencies::new(lambda.clone()).map_err(|e| e.to_string())?;
        let lmax = lambda.iter().cloned().fold(0.0, f64::max);
        let scale = (1..=n).map(|k| k as f64).product::<f64>() * lmax.powi(n as i32).max(1.0);
        for j in 0..=n {
            let v = expcore::eval_phi_deriv(&freq, j, 0.0).map_err(|e| e.to_string())?;
            let target = if j == n { 1.0 } else { 0.0 };
            let err = (v - target).abs() / scale;
            worst = worst.max(err);
            ensure(err <= 1e-12, || format!("case {case}: Φ^({j})(0) = {v:e} for Λ = {lambda:?}"))?;
        }
    }
    Ok(format!("50 frequency sets, worst scaled error {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..20 {
        let n = random_order(&mut rng);
        let mut exact: Vec<Rational> = Vec::new();
        while exact.len() < n + 1 {
            let r = ratio(rng.random_range(1..=60), rng.random_range(1..=6));
            if !exact.contains(&r) {
                exact.push(r);
            }
        }
        let freq = Frequencies::from_rationals(exact.clone()).map_err(|e| e.to_string())?;
        let series = expcore::taylor_coeffs(&freq, n + 60).map_err(|e| e.to_string())?;
        let SeriesCoeffs::Exact(coeffs) = &series.coeffs else {
            return Err(format!("case {case}: rational frequencies gave floating coefficients"));
        };
        ensure(series.start == n && coeffs.len() == 61, || format!("case {case}: wrong coefficient range"))?;
        ensure(coeffs[0] == Rational::one() / factorial(n as u32), || {
            format!("case {case}: a_N = {} for N = {n}", coeffs[0])
        })?;
        ensure(coeffs.iter().all(|a| *a >= Rational::zero()), || format!("case {case}: negative a_s"))?;

        // a_s = Σ_i λ_i^s / (s! Π_{j≠i}(λ_i − λ_j)) for the first few s
        for (m, a) in coeffs.iter().take(8).enumerate() {
            let s = n + m;
            let mut sum = Rational::zero();
            for (i, li) in exact.iter().enumerate() {
                let mut w = Rational::one();
                for (j, lj) in exact.iter().enumerate() {
                    if i != j {
                        w *= li - lj;
                    }
                }
                sum += num_traits::pow(li.clone(), s) / w;
            }
            ensure(*a == sum / factorial(s as u32), || {
                format!("case {case}: a_{s} disagrees with the partial fractions")
            })?;
        }
    }
    Ok("20 rational frequency sets, a_N = 1/N! and a_s >= 0 up to N+60".into())
}

fn criterion_3() -> Outcome {
    let alphas = [ratio(1, 2), rat(1), rat(2), rat(5)];
    let betas = [rat(0), ratio(1, 2), rat(1), rat(3)];
    let mut count = 0;
    for a in &alphas {
        for b in &betas {
            for m in 0..=6 {
                let closed = hankel::chammam_det(a, b, m).map_err(|e| e.to_string())?;
                let det = exact_det(&hankel::chammam_matrix(a, b, m).map_err(|e| e.to_string())?);
                ensure(closed == det, || format!("α={a}, β={b}, m={m}: product {closed} vs determinant {det}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} grid points, exact equality"))
}

fn criterion_4() -> Outcome {
    let xs = [ratio(1, 3), rat(1), ratio(7, 2)];
    let mut count = 0;
    for n in [1usize, 3, 5] {
        for k in 0..=n / 2 {
            for x in &xs {
                for s in n + 1..=n + 6 {
                    let m = hankel::monomial_hankel(n, k, s, x).map_err(|e| e.to_string())?;
                    let closed = hankel::monomial_hankel_det_closed_form(n, k, s, x).map_err(|e| e.to_string())?;
                    ensure(exact_det(&m) == closed, || format!("N={n}, k={k}, s={s}, x={x}"))?;
                    count += 1;
                }
                if k >= 1 {
                    let m = hankel::monomial_hankel(n, k, n, x).map_err(|e| e.to_string())?;
                    ensure(exact_det(&m).is_zero(), || format!("N={n}, k={k}, s=N, x={x}: nonzero determinant"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} exact determinant identities"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = CheckOptions::default();
    for (region, x_hi, count) in [(Region::Halfline, 4.0, 200), (Region::UnitInterval, 1.0, 200)] {
        for case in 0..count {
            let n = random_order(&mut rng);
            let lambda = spread_values(&mut rng, n + 1, 1e-3, 8.0, 0.05);
            let x =
                if region == Region::Halfline { rng.random_range(1e-6..=x_hi) } else { rng.random_range(0.0..=x_hi) };
            let freq = Frequencies::new(lambda.clone()).map_err(|e| e.to_string())?;
            let report = hankel::theorem1_check(&freq, x, region, &opts).map_err(|e| e.to_string())?;
            ensure(report.pass, || {
                let bad: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| !c.report.is_psd)
                    .map(|c| format!("{}@k={} min_eig={:?}", c.form, c.k, c.report.min_eig))
                    .collect();
                format!("{region:?} case {case}: Λ={lambda:?}, x={x}: {bad:?}, hypothesis {}", report.hypothesis.pass)
            })?;
        }
    }

    let freq = Frequencies::new(vec![1.0, 2.0, 3.0, 4.0]).map_err(|e| e.to_string())?;
    let report = hankel::theorem1_check(&freq, 0.0, Region::Halfline, &opts).map_err(|e| e.to_string())?;
    ensure(report.pass, || "x = 0 boundary rejected".into())?;
    let q1 = report.checks.iter().find(|c| c.k == 1 && c.form == HankelForm::Plain).ok_or("no Q1 form at k = 1")?;
    let HankelMatrix::Float(m) = &q1.matrix else { return Err("unexpected exact matrix".into()) };
    ensure(m.as_slice() == [1.0, 0.0, 0.0, 0.0], || format!("x = 0 Hankel matrix {m}"))?;
    ensure(q1.report.is_psd && !q1.report.is_pd, || "x = 0 Hankel matrix should be singular PSD".into())?;
    Ok("400 random (Λ, x) certified, x = 0 gives [[1,0],[0,0]]".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let count = rng.random_range(1..=3);
        let xs = spread_values(&mut rng, count, 0.05, 5.0, 0.25);
        let pairs: Vec<(f64, f64)> = xs.iter().map(|&x| (x, rng.random_range(0.05..=2.0))).collect();
        let mu = AtomicMeasure::from_pairs(&pairs).map_err(|e| e.to_string())?;
        let c = measures::power_moments(&Measure::Atomic(mu), 5).map_err(|e| e.to_string())?;
        let nu = recover::recover_measure(&c).map_err(|e| format!("case {case}: {e}"))?;
        ensure(nu.len() == count, || format!("case {case}: {count} atoms became {}", nu.len()))?;
        for (atom, &(x, w)) in nu.atoms().iter().zip(&pairs) {
            let err = ((atom.x - x).abs() / x).max((atom.w - w).abs() / w);
            worst = worst.max(err);
            ensure(err <= 1e-6, || format!("case {case}: ({x}, {w}) recovered as ({}, {})", atom.x, atom.w))?;
        }
    }
    Ok(format!("100 atomic measures, worst relative error {worst:.1e}"))
}

fn midpoint_uniform_oracle(lambda: &[f64], panels: usize) -> Vec<f64> {
    let h = 1.0 / panels as f64;
    let mut acc = vec![0.0; lambda.len()];
    for i in 0..panels {
        for (slot, v) in acc.iter_mut().zip(basis_oracle(lambda, (i as f64 + 0.5) * h)) {
            *slot += v * h;
        }
    }
    acc
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for (domain, hi) in [(Domain::Halfline, 3.0), (Domain::unit(), 1.0)] {
        for case in 0..100 {
            let n = random_order(&mut rng);
            let lambda = spread_values(&mut rng, n + 1, 0.05, 6.0, 0.1);
            let count = rng.random_range(1..=3);
            let xs = spread_values(&mut rng, count, 0.0, hi, 0.05);
            let pairs: Vec<(f64, f64)> = xs.iter().map(|&x| (x, rng.random_range(0.05..=2.0))).collect();
            let mu = Measure::Atomic(AtomicMeasure::from_pairs(&pairs).map_err(|e| e.to_string())?);
            let freq = Frequencies::new(lambda.clone()).map_err(|e| e.to_string())?;
            let report = recover::verify_transfer(&freq, &mu, domain).map_err(|e| e.to_string())?;
            let residual = report.max_residual.unwrap_or(f64::INFINITY);
            worst = worst.max(residual);
            ensure(report.pass && residual <= 1e-8, || {
                format!("{} case {case}: Λ={lambda:?}, μ={pairs:?}: {:?}", domain.name(), report.diagnostics)
            })?;
        }
    }

    let lambda = [1.0, 2.0, 3.0, 4.0];
    let freq = Frequencies::new(lambda.to_vec()).map_err(|e| e.to_string())?;
    let dirac = recover::verify_transfer(&freq, &Measure::Atomic(AtomicMeasure::dirac(1.0)), Domain::Halfline)
        .map_err(|e| e.to_string())?;
    ensure(dirac.pass, || format!("δ_1 case failed: {:?}", dirac.diagnostics))?;
    ensure(close(&dirac.c_hat, &basis_oracle(&lambda, 1.0), 1e-8), || format!("δ_1 moments {:?}", dirac.c_hat))?;

    let uniform = recover::verify_transfer(&freq, &Measure::Uniform { a: 0.0, b: 1.0 }, Domain::unit())
        .map_err(|e| e.to_string())?;
    ensure(uniform.pass, || format!("uniform case failed: {:?}", uniform.diagnostics))?;
    let oracle = midpoint_uniform_oracle(&lambda, 1_000_000);
    ensure(close(&uniform.c_hat, &oracle, 1e-8), || format!("uniform moments {:?} vs {oracle:?}", uniform.c_hat))?;
    Ok(format!("200 random transfers, worst residual {worst:.1e}; δ_1 and uniform(0,1) match the oracle"))
}

fn refused(c: &MomentSequence) -> Result<(), String> {
    match recover::recover_measure(c) {
        Ok(nu) => Err(format!("recovered {nu:?} from non-moment data")),
        Err(e) if e.stage_tag() == Some(Stage::Solvability) => Ok(()),
        Err(e) => Err(format!("refused without a solvability tag: {e}")),
    }
}

fn criterion_8() -> Outcome {
    let half = MomentSequence::from_exact(vec![rat(1), rat(2), rat(1), rat(2)], Domain::Halfline)
        .map_err(|e| e.to_string())?;
    ensure(!recover::stieltjes_solvable(&half).map_err(|e| e.to_string())?.solvable, || {
        "(1,2,1,2) accepted on the half-line".into()
    })?;
    refused(&half)?;

    let unit =
        MomentSequence::from_exact(vec![rat(1), rat(2), rat(4), rat(8)], Domain::unit()).map_err(|e| e.to_string())?;
    ensure(!recover::hausdorff_solvable(&unit).map_err(|e| e.to_string())?.solvable, || {
        "(1,2,4,8) accepted on [0,1]".into()
    })?;
    refused(&unit)?;

    let floating = MomentSequence::new(half.values().to_vec(), Domain::Halfline).map_err(|e| e.to_string())?;
    refused(&floating)?;
    Ok("(1,2,1,2) and (1,2,4,8) refused at the solvability stage".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("boundary conditions of Φ at 0", criterion_1),
        ("Taylor coefficients", criterion_2),
        ("Chammam determinant identity", criterion_3),
        ("monomial Hankel factorization", criterion_4),
        ("Hankel positivity of the basis", criterion_5),
        ("recovery round trip", criterion_6),
        ("exponential to classical moment transfer", criterion_7),
        ("negative controls", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
