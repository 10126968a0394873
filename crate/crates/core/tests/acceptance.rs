//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

use std::time::Instant;

use num_complex::Complex64 as C64;
use qms_core::channel::{ChannelFile, DensityMatrix, GeneratorMap, SuperOperator};
use qms_core::cli;
use qms_core::contraction;
use qms_core::ensembles::{self, perturb_channel, random_channel, EnsembleConfig, EnsembleMode};
use qms_core::finite_time::{
    self, ConvergencePair, PairRequest, ValidationOptions, DEFAULT_CONTINUOUS_STEP,
};
use qms_core::report::{format_sig, BoundReport, Regime};
use qms_core::rng::derive_seed;
use qms_core::spectral::{self, FactorMultiplicity};
use qms_core::stability::{self, AnalysisOptions, PerturbationOutcome};
use rayon::prelude::*;

const MASTER_SEED: u64 = 20_240_601;
const RESTARTS: usize = 16;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn opts(seed: u64) -> AnalysisOptions {
    AnalysisOptions {
        restarts: RESTARTS,
        seed,
    }
}

/// Random channel, a perturbation of it and the perturbed map's stationary
/// state. Kraus rank and perturbation strength cycle with the index.
fn random_triple(d: usize, i: u64) -> (SuperOperator, SuperOperator, DensityMatrix) {
    let seed = derive_seed(MASTER_SEED ^ d as u64, i);
    let rank = 2 + (i as usize % (d * d - 1));
    let eps = [1e-3, 1e-2, 1e-1][i as usize % 3];
    let t1 = random_channel(d, rank, seed).expect("random channel");
    let t2 = perturb_channel(&t1, eps, derive_seed(seed, 1)).expect("perturbation");
    let rho2 = spectral::stationary_states(&t2)
        .expect("stationary")
        .states
        .remove(0);
    (t1, t2, rho2)
}

/// Criteria 2 to 4 share one qubit ensemble.
fn qubit_ensemble(n: u64) -> Vec<PerturbationOutcome> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let (t1, t2, rho2) = random_triple(2, i);
            stability::fixed_point_perturbation(&t1, &t2, &rho2, &opts(i))
                .expect("perturbation analysis")
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let per_dim = 340;
    let worst: Vec<(usize, f64)> = [2usize, 3, 4]
        .iter()
        .map(|&d| {
            let w = (0..per_dim)
                .into_par_iter()
                .map(|i| {
                    let (t1, t2, rho2) = random_triple(d, 10_000 + i);
                    let out = stability::fixed_point_perturbation(
                        &t1,
                        &t2,
                        &rho2,
                        &AnalysisOptions {
                            restarts: 1,
                            seed: i,
                        },
                    )
                    .expect("perturbation analysis");
                    out.identity_residual
                })
                .reduce(|| 0.0, f64::max);
            (d, w)
        })
        .collect();
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    verdict(
        max <= 1e-8,
        format!(
            "{} triples over d = 2, 3, 4; max identity residual {:.2e} (d=2 {:.1e}, d=3 {:.1e}, d=4 {:.1e})",
            3 * per_dim,
            max,
            worst[0].1,
            worst[1].1,
            worst[2].1
        ),
    )
}

fn criterion_2(ens: &[PerturbationOutcome]) -> Verdict {
    let worst = ens.iter().map(|o| o.slack()).fold(f64::INFINITY, f64::min);
    let t1 = SuperOperator::depolarizing(2, 0.5);
    let t2 = SuperOperator::identity(2);
    let out = stability::fixed_point_perturbation(&t1, &t2, &DensityMatrix::basis(2, 0), &opts(0))
        .unwrap();
    let tight = close(out.bound_value, 1.0, 1e-9) && close(out.actual_distance, 1.0, 1e-9);
    verdict(
        worst >= -1e-4 && tight,
        format!(
            "{} qubit pairs, min slack {:.3e}; depolarizing witness bound {} actual {}",
            ens.len(),
            worst,
            format_sig(out.bound_value, 12),
            format_sig(out.actual_distance, 12)
        ),
    )
}

fn criterion_3(ens: &[PerturbationOutcome]) -> Verdict {
    let mut used = 0;
    let mut worst = f64::INFINITY;
    for o in ens {
        let c = &o.conditions;
        if !c.unique_stationary_state || c.tau_t.value > 0.999 {
            continue;
        }
        used += 1;
        worst = worst.min(c.kappa_contraction.unwrap() - c.kappa_tau_z.value);
    }
    let mut family_err: f64 = 0.0;
    for k in 1..=10 {
        let p = k as f64 / 10.0;
        let c = stability::condition_numbers(&SuperOperator::depolarizing(2, p), &opts(0)).unwrap();
        family_err = family_err
            .max((c.kappa_tau_z.value - 1.0 / p).abs())
            .max((c.kappa_contraction.unwrap() - 1.0 / p).abs());
    }
    verdict(
        used >= 1000 && worst >= -1e-4 && family_err <= 1e-6,
        format!("{used} qubit channels, min slack {worst:.3e}; depolarizing p = 0.1..1 max deviation {family_err:.1e}"),
    )
}

fn criterion_4(ens: &[PerturbationOutcome]) -> Verdict {
    let mut lower_worst = f64::INFINITY;
    let mut upper_worst = f64::INFINITY;
    for o in ens {
        let c = &o.conditions;
        lower_worst = lower_worst.min(c.kappa_tau_z.value - c.spectral_lower);
        upper_worst = upper_worst.min(c.spectral_upper - c.kappa_tau_z.value);
    }
    let c = stability::condition_numbers(&SuperOperator::depolarizing(2, 0.5), &opts(0)).unwrap();
    let upper_oracle = 2.0 * (5.0 * std::f64::consts::PI / 3.0 + 2.0 * 2f64.sqrt()) * 8.0 / 0.5;
    let fixture = close(c.spectral_lower, 2.0, 1e-9)
        && close(c.kappa_tau_z.value, 2.0, 1e-9)
        && close(c.spectral_upper, upper_oracle, 1e-9)
        && format_sig(c.spectral_upper, 4) == "258.1";
    verdict(
        lower_worst >= -1e-4 && upper_worst >= 0.0 && fixture,
        format!(
            "{} qubit channels, min lower slack {:.3e}, min upper slack {:.3e}; depol(0.5) lower {} tau_z {} upper {}",
            ens.len(),
            lower_worst,
            upper_worst,
            format_sig(c.spectral_lower, 12),
            format_sig(c.kappa_tau_z.value, 12),
            format_sig(c.spectral_upper, 5)
        ),
    )
}

fn summarize(rows: &[BoundReport], tol: f64) -> (usize, usize, f64) {
    let errors = rows.iter().filter(|r| r.regime == Regime::Error).count();
    let worst = rows
        .iter()
        .filter(|r| r.regime != Regime::Error)
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    let violations = rows
        .iter()
        .filter(|r| r.regime != Regime::Error && !r.holds(tol))
        .count();
    (errors, violations, worst)
}

fn trajectory_rows(rows: &[BoundReport]) -> Vec<BoundReport> {
    rows.iter()
        .filter(|r| r.regime != Regime::Stationary)
        .cloned()
        .collect()
}

fn depol_fixture_rows(steps: u64) -> (Vec<BoundReport>, ConvergencePair) {
    let t = SuperOperator::depolarizing(2, 0.5);
    let e = SuperOperator::depolarizing(2, 0.6);
    let rho = DensityMatrix::basis(2, 0);
    let v = ValidationOptions {
        restarts: RESTARTS,
        seed: 0,
    };
    let mut pair = finite_time::derive_pair(&t, PairRequest::Chi2, steps, &v).unwrap();
    let rows = finite_time::discrete_trajectory_check(&t, &e, &rho, &rho, steps, &mut pair, &v, 0)
        .unwrap();
    (rows, pair)
}

fn criterion_5() -> Verdict {
    let mut cfg = EnsembleConfig::new(2, 200, MASTER_SEED);
    cfg.perturbation_eps = 1e-2;
    cfg.steps = 200;
    cfg.restarts = RESTARTS;
    let rows = trajectory_rows(&ensembles::sweep(&cfg).unwrap());
    let (errors, violations, worst) = summarize(&rows, 1e-6);

    let (fixture, _) = depol_fixture_rows(50);
    let first = &fixture[0];
    let oracle_ok = fixture.iter().enumerate().all(|(i, r)| {
        let n = (i + 1) as i32;
        close(r.exact, (0.5f64.powi(n) - 0.4f64.powi(n)).abs(), 1e-12)
            && close(r.bound, 0.2 * (1.0 - 0.5f64.powi(n)), 1e-12)
    });
    let equality = close(first.exact, first.bound, 1e-9);
    verdict(
        errors == 0 && violations == 0 && equality && oracle_ok,
        format!(
            "{} rows from 200 qubit pairs (eps 1e-2, n ≤ 200), {errors} errors, {violations} violations, min slack {worst:.3e}; depol fixture n=1 exact {} bound {}",
            rows.len(),
            format_sig(first.exact, 12),
            format_sig(first.bound, 12)
        ),
    )
}

fn criterion_6() -> Verdict {
    let pairs = [
        ConvergencePair::discrete(1.0, 0.5).unwrap(),
        ConvergencePair::discrete(4.0, 0.5).unwrap(),
        ConvergencePair::discrete(3.0, 0.7).unwrap(),
        ConvergencePair::discrete(2.0 * 2f64.sqrt(), 0.5).unwrap(),
        ConvergencePair::discrete(0.5, 0.9).unwrap(),
    ];
    let d_t = 0.1;
    let mut limit_err: f64 = 0.0;
    let mut dominated = true;
    for p in &pairs {
        let far = finite_time::discrete_bound(p, 100_000, 1.0, d_t)
            .unwrap()
            .bound_value;
        let lim = finite_time::discrete_limit(p, d_t).unwrap();
        limit_err = limit_err.max((far - lim).abs());
        dominated &= finite_time::asymptotic_discrete(p, d_t).unwrap() >= lim - 1e-15;
    }
    let one = &pairs[0];
    let matches_where_tight = close(
        finite_time::asymptotic_discrete(one, d_t).unwrap(),
        finite_time::discrete_limit(one, d_t).unwrap(),
        1e-12,
    ) && close(
        finite_time::asymptotic_discrete(one, d_t).unwrap(),
        0.2,
        1e-12,
    );

    let cp = ConvergencePair::continuous(3.0, 0.4).unwrap();
    let far = finite_time::continuous_bound(&cp, 1e4, 1.0, d_t)
        .unwrap()
        .bound_value;
    let cont_err = (far - finite_time::asymptotic_continuous(&cp, d_t).unwrap()).abs();

    // Simulated limsup: tail of each trajectory against the asymptotic value.
    let (fixture, pair) = depol_fixture_rows(200);
    let asym = finite_time::asymptotic_discrete(&pair, 0.1).unwrap();
    let tail = fixture[150..].iter().map(|r| r.exact).fold(0.0, f64::max);
    let mut fixtures_ok = tail <= asym;
    let v = ValidationOptions {
        restarts: RESTARTS,
        seed: 0,
    };
    for i in 0..20u64 {
        let seed = derive_seed(MASTER_SEED, 50_000 + i);
        let t = random_channel(2, 4, seed).unwrap();
        let e = perturb_channel(&t, 1e-2, derive_seed(seed, 1)).unwrap();
        let rho = DensityMatrix::basis(2, 0);
        let mut p = finite_time::derive_pair(&t, PairRequest::Chi2, 200, &v).unwrap();
        let rows =
            finite_time::discrete_trajectory_check(&t, &e, &rho, &rho, 200, &mut p, &v, i).unwrap();
        let d_t = contraction::norm_1to1(&(&e - &t), RESTARTS, seed, false)
            .unwrap()
            .value;
        let tail = rows[150..].iter().map(|r| r.exact).fold(0.0, f64::max);
        fixtures_ok &= tail <= finite_time::asymptotic_discrete(&p, d_t).unwrap();
    }
    verdict(
        limit_err <= 1e-12 && cont_err <= 1e-12 && dominated && matches_where_tight && fixtures_ok,
        format!(
            "exact limit vs n=1e5 formula {limit_err:.1e}, continuous {cont_err:.1e}; asymptotic value dominates exact limit and equals it when Kμ^n̂ = 1; limsup dominated on depol and 20 random fixtures"
        ),
    )
}

fn criterion_7() -> Verdict {
    let lt = GeneratorMap::depolarizing(2, 1.0);
    let le = GeneratorMap::depolarizing(2, 1.1);
    let rho = DensityMatrix::basis(2, 0);
    let v = ValidationOptions {
        restarts: RESTARTS,
        seed: 0,
    };
    let check = |request| {
        let mut pair = finite_time::derive_continuous_pair(
            &lt,
            request,
            DEFAULT_CONTINUOUS_STEP,
            20.0,
            100,
            &v,
        )
        .unwrap();
        finite_time::continuous_trajectory_check(&lt, &le, &rho, &rho, 20.0, 100, &mut pair, &v, 0)
            .unwrap()
    };
    // K = 1, ν = γ is the exact pair of the depolarizing semigroup.
    let exact_pair = check(PairRequest::UserSupplied { k: 1.0, rate: 1.0 });
    let oracle_ok = exact_pair.len() == 100
        && exact_pair.iter().all(|r| {
            let t = r.n_or_t;
            close(r.exact, ((-t).exp() - (-1.1 * t).exp()).abs(), 1e-9)
                && close(r.bound, (1.0 - (-t).exp()) * 0.1, 1e-6)
        });
    let mut fixture = exact_pair;
    fixture.extend(check(PairRequest::Chi2));
    let (_, fv, fworst) = summarize(&fixture, 1e-6);

    let mut cfg = EnsembleConfig::new(2, 50, MASTER_SEED);
    cfg.mode = EnsembleMode::Continuous;
    cfg.steps = 100;
    cfg.t_max = 20.0;
    cfg.perturbation_eps = 1e-2;
    let rows = trajectory_rows(&ensembles::sweep(&cfg).unwrap());
    let (errors, violations, worst) = summarize(&rows, 1e-6);
    verdict(
        fv == 0 && oracle_ok && errors == 0 && violations == 0,
        format!(
            "semigroup fixture with exact and chi2 pairs, min slack {fworst:.3e}, closed form matched: {oracle_ok}; {} rows from 50 random generator pairs, {errors} errors, {violations} violations, min slack {worst:.3e}",
            rows.len()
        ),
    )
}

/// Reversible stochastic matrix from a random symmetric weight matrix.
fn reversible_chain(d: usize, seed: u64) -> SuperOperator {
    let mut rng = qms_core::rng::Prng::new(seed);
    let mut w = nalgebra::DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let x = 0.05 + rng.uniform();
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    for i in 0..d {
        let s: f64 = w.row(i).sum();
        for j in 0..d {
            w[(i, j)] /= s;
        }
    }
    SuperOperator::from_stochastic(&w).unwrap()
}

/// Generalized amplitude damping: decay `γ` towards a thermal state with
/// ground population `p`.
fn generalized_amplitude_damping(gamma: f64, p: f64) -> SuperOperator {
    let c = |x: f64| C64::new(x, 0.0);
    let m = |a: f64, b: f64, cc: f64, dd: f64| {
        nalgebra::DMatrix::from_row_slice(2, 2, &[c(a), c(b), c(cc), c(dd)])
    };
    let s = (1.0 - gamma).sqrt();
    let kraus = [
        m(1.0, 0.0, 0.0, s) * c(p.sqrt()),
        m(0.0, gamma.sqrt(), 0.0, 0.0) * c(p.sqrt()),
        m(s, 0.0, 0.0, 1.0) * c((1.0 - p).sqrt()),
        m(0.0, 0.0, gamma.sqrt(), 0.0) * c((1.0 - p).sqrt()),
    ];
    SuperOperator::from_kraus(&kraus).unwrap()
}

fn criterion_8() -> Verdict {
    let v = |seed| ValidationOptions {
        restarts: RESTARTS,
        seed,
    };

    let chi2: Vec<bool> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let d = 2 + (i as usize % 3);
            let seed = derive_seed(MASTER_SEED, 70_000 + i);
            let t = random_channel(d, d * d, seed).unwrap();
            let p = finite_time::derive_pair(&t, PairRequest::Chi2, 50, &v(seed)).unwrap();
            !p.is_poisoned()
        })
        .collect();
    let chi2_ok = chi2.iter().filter(|&&x| x).count();

    let db: Vec<Option<bool>> = (0..150u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(MASTER_SEED, 80_000 + i);
            let mut rng = qms_core::rng::Prng::new(seed);
            let t = match i % 3 {
                0 => reversible_chain(2 + (i as usize / 3) % 3, seed),
                1 => generalized_amplitude_damping(
                    0.05 + 0.9 * rng.uniform(),
                    0.05 + 0.9 * rng.uniform(),
                ),
                _ => SuperOperator::depolarizing(
                    2 + (i as usize / 3) % 3,
                    0.05 + 0.95 * rng.uniform(),
                ),
            };
            match finite_time::derive_pair(&t, PairRequest::DetailedBalance, 50, &v(seed)) {
                Ok(p) => Some(!p.is_poisoned()),
                Err(_) => None,
            }
        })
        .collect();
    let db_admissible = db.iter().filter(|x| x.is_some()).count();
    let db_ok = db.iter().filter(|x| **x == Some(true)).count();

    let minpoly: Vec<Option<bool>> = (0..120u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(MASTER_SEED, 90_000 + i);
            let t = random_channel(2, 2 + (i as usize % 3), seed).unwrap();
            let delta = spectral::transient_part(&t, &spectral::fixed_point_projector(&t).unwrap())
                .unwrap();
            if !spectral::minimal_polynomial(&delta)
                .ok()?
                .is_diagonalizable()
            {
                return None;
            }
            let mu = (1.0
                + spectral::spectral_quantities(&t)
                    .unwrap()
                    .subdominant_modulus)
                / 2.0;
            let p =
                finite_time::derive_pair(&t, PairRequest::MinimalPolynomial { mu }, 100, &v(seed))
                    .unwrap();
            Some(!p.is_poisoned())
        })
        .collect();
    let minpoly_used = minpoly.iter().filter(|x| x.is_some()).count();
    let minpoly_ok = minpoly.iter().filter(|x| **x == Some(true)).count();

    // Direct evaluation of Π (1 − μ|λ|)/(μ − |λ|) over the roots {0, 0.5}.
    let mu = 0.6;
    let oracle: f64 = [0.0f64, 0.5]
        .iter()
        .map(|l| (1.0 - mu * l) / (mu - l))
        .product();
    let t = SuperOperator::depolarizing(2, 0.5);
    let fixture = finite_time::pair_minimal_polynomial(&t, mu).unwrap();
    let details = fixture.spectral_details.clone().unwrap();
    let delta =
        spectral::transient_part(&t, &spectral::fixed_point_projector(&t).unwrap()).unwrap();
    let m = spectral::minimal_polynomial(&delta)
        .unwrap()
        .factor_count(FactorMultiplicity::default());
    let fixture_ok = m == 2
        && details.factor_count == 2
        && close(details.modulus_product, oracle, 1e-9)
        && format_sig(details.modulus_product, 5) == "11.667";
    let validated = finite_time::derive_pair(&t, PairRequest::MinimalPolynomial { mu }, 100, &v(0))
        .map(|p| !p.is_poisoned())
        .unwrap_or(false);

    verdict(
        chi2_ok == chi2.len() && db_admissible >= 100 && db_ok == db_admissible && minpoly_used >= 100 && minpoly_ok == minpoly_used && fixture_ok && validated,
        format!(
            "chi2 {chi2_ok}/{} certified to n=50; detailed balance {db_ok}/{db_admissible} admissible certified to n=50; minimal-polynomial {minpoly_ok}/{minpoly_used} diagonalizable qubit channels certified to n=100; depol(0.5), μ=0.6: |m| = {m}, product {} (oracle {})",
            chi2.len(),
            format_sig(details.modulus_product, 12),
            format_sig(oracle, 12)
        ),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qms").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, out)
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, f: ChannelFile| {
        let p = dir.path().join(name);
        std::fs::write(&p, f.to_json()).unwrap();
        p.to_str().unwrap().to_string()
    };
    let t = random_channel(3, 4, 5).unwrap();
    let e = perturb_channel(&t, 1e-2, 6).unwrap();
    let a = write("t.json", ChannelFile::from_superoperator(&t, Some("t")));
    let b = write("e.json", ChannelFile::from_superoperator(&e, Some("e")));
    let g1 = write(
        "g1.json",
        ChannelFile::from_generator(&GeneratorMap::depolarizing(2, 1.0), None),
    );
    let g2 = write(
        "g2.json",
        ChannelFile::from_generator(&GeneratorMap::depolarizing(2, 1.1), None),
    );
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "analyze",
            &a,
            "--format",
            "json",
            "--seed",
            "3",
            "--restarts",
            "8",
        ],
        vec![
            "compare",
            &a,
            &b,
            "--format",
            "json",
            "--seed",
            "3",
            "--restarts",
            "8",
        ],
        vec![
            "compare",
            &a,
            &b,
            "--format",
            "csv",
            "--seed",
            "3",
            "--restarts",
            "8",
        ],
        vec![
            "trajectory",
            &a,
            &b,
            "--format",
            "csv",
            "--steps",
            "30",
            "--restarts",
            "8",
        ],
        vec![
            "trajectory",
            &g1,
            &g2,
            "--format",
            "json",
            "--steps",
            "40",
            "--restarts",
            "8",
        ],
        vec!["pairs", &a, "--format", "json", "--restarts", "8"],
        vec![
            "ensemble",
            "--dim",
            "2",
            "--count",
            "12",
            "--format",
            "csv",
            "--seed",
            "9",
            "--restarts",
            "8",
        ],
        vec![
            "ensemble",
            "--dim",
            "2",
            "--count",
            "6",
            "--mode",
            "continuous",
            "--format",
            "json",
            "--seed",
            "9",
        ],
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for args in &invocations {
        let (c1, o1) = run_cli(args);
        let (c2, o2) = run_cli(args);
        if c1 == c2
            && o1 == o2
            && !o1.is_empty()
            && c1 != cli::EXIT_USAGE
            && c1 != cli::EXIT_NUMERIC
        {
            identical += 1;
        } else {
            failures.push(format!("{} (exit {c1}/{c2})", args[0]));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{identical}/{} invocations byte-identical on repeat{}",
            invocations.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; differing: {}", failures.join(", "))
            }
        ),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() {
    let start = Instant::now();
    let ensemble = qubit_ensemble(1050);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("fixed-point identity", Box::new(criterion_1)),
        (
            "stationary bound with tau(Z)",
            Box::new(|| criterion_2(&ensemble)),
        ),
        (
            "contraction condition number",
            Box::new(|| criterion_3(&ensemble)),
        ),
        ("spectral sandwich", Box::new(|| criterion_4(&ensemble))),
        ("discrete finite-time bound", Box::new(criterion_5)),
        ("asymptotic discrete bound", Box::new(criterion_6)),
        ("continuous finite-time bound", Box::new(criterion_7)),
        ("convergence pairs", Box::new(criterion_8)),
        ("determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            name,
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of 9 passed in {:.1}s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
