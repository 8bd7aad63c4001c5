//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).

use std::time::Instant;

use num_complex::Complex;
use ris_core::channel::{self, ChannelSpec, RisGeometry};
use ris_core::configurator::stm_configure;
use ris_core::dbm_to_watts;
use ris_core::harness::{
    run_scenario, sweep, CompensationInit, EvalLabel, ScenarioSpec, SweepAxis,
};
use ris_core::hwi::{apply_psn, compose_imperfections, DeformationSpec, HwiSpec, PsnSpec, RowMode};
use ris_core::ofdm::{
    coherent_upper_bound_from, relative_rate, water_fill, water_filled_rate, OfdmSpec,
    SubcarrierResponse,
};
use ris_core::optim::{
    finite_difference_gradient, gradient, max_relative_gradient_error, Method, OptimizerOptions,
};
use ris_core::rng::RandomStream;

fn polar(d: f64, az_deg: f64) -> [f64; 3] {
    let az = az_deg.to_radians();
    [d * az.sin(), d * az.cos(), 0.0]
}

fn desk_channel(n_rows: usize, n_cols: usize) -> ChannelSpec<f64> {
    ChannelSpec {
        geometry: RisGeometry::with_spacing_over_lambda(n_rows, n_cols, 0.25, 3.0e9).unwrap(),
        ap_position: polar(50.0, -30.0),
        ue_position: polar(20.0, 40.0),
        paths_ap_ris: 21,
        paths_ris_ue: 11,
        paths_direct: 20,
        kappa_nlos: 0.1,
        direct_rel_db: -20.0,
    }
}

fn desk_scenario(n_rows: usize, n_cols: usize, trials: u64) -> ScenarioSpec<f64> {
    ScenarioSpec {
        name: "acceptance".into(),
        channel: desk_channel(n_rows, n_cols),
        ofdm: ris_core::ofdm::OfdmParams {
            k_subcarriers: 128,
            bandwidth: 10.5e6,
            noise_density: dbm_to_watts(-164.0),
            mean_power: dbm_to_watts(30.0),
        },
        hwi: HwiSpec::none(),
        optimizer: OptimizerOptions::default(),
        init: CompensationInit::Stm,
        labels: vec![EvalLabel::IdealStm],
        trials,
        seed: 42,
        record_traces: false,
    }
}

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {id} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}): {detail}");
}

#[test]
fn criterion_01_gradient_oracle() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut stream = RandomStream::new(1001, 0);
    let grids = [(1, 2), (2, 2), (2, 4), (4, 4)]; // N in {2, 4, 8, 16}
    for instance in 0..100u64 {
        let epsilon = [1.0, 0.5, 0.0][instance as usize % 3];
        let h_max = [0.0, 0.1][instance as usize % 2];
        let (rows, cols) = grids[instance as usize % grids.len()];

        let mut spec = desk_channel(rows, cols);
        spec.paths_ap_ris = 4;
        spec.paths_ris_ue = 3;
        spec.paths_direct = 3;
        let k = 32;
        let mut ch_stream = RandomStream::new(1001, 100 + instance);
        let ch = channel::realize(&spec, k, 10.5e6, &mut ch_stream).unwrap();

        let stm = stm_configure(&ch).unwrap();
        let hwi = HwiSpec {
            psn: Some(PsnSpec::new(epsilon).unwrap()),
            deformation: (h_max > 0.0).then(|| {
                DeformationSpec::new(h_max, std::f64::consts::PI, 0.0, 0.0, RowMode::Floor)
                    .unwrap()
            }),
        };
        let omega = compose_imperfections(
            stm.config.phases(),
            &hwi,
            &spec.geometry,
            &mut RandomStream::new(1001, 200 + instance),
        )
        .unwrap();
        let theta: Vec<f64> = (0..ch.n_elements())
            .map(|_| stream.uniform(-1.5, 1.5).unwrap())
            .collect();

        let analytic = gradient(&ch, &omega, &theta).unwrap();
        let reference = finite_difference_gradient(&ch, &omega, &theta, 1e-5).unwrap();
        worst = worst.max(max_relative_gradient_error(&analytic, &reference));
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-4 && elapsed.as_secs() < 30;
    report(
        1,
        "gradient oracle",
        pass,
        &format!("max relative error {worst:.3e} over 100 instances in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_psn_compensation_recovery() {
    let started = Instant::now();
    let mut spec = desk_scenario(10, 10, 100);
    spec.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
    spec.optimizer = OptimizerOptions {
        method: Method::Gd,
        learning_rate: 1.0e-2,
        max_iters: 60,
        ..OptimizerOptions::default()
    };
    spec.labels = vec![
        EvalLabel::IdealStm,
        EvalLabel::ImpairedStm,
        EvalLabel::Compensated,
    ];
    spec.record_traces = true;

    let out = run_scenario(&spec).unwrap();
    let ideal = out.aggregate(EvalLabel::IdealStm).unwrap().mean_relative_rate;
    let trace = out.mean_relative_rate_trace.as_ref().unwrap();
    let within = |k: usize| ideal - trace[k.min(trace.len() - 1)] <= 0.05;
    let first_crossing = (0..trace.len()).find(|&k| within(k));
    let elapsed = started.elapsed();

    let pass = within(50)
        && first_crossing.is_some_and(|k| k <= 40)
        && elapsed.as_secs() < 600;
    report(
        2,
        "PSN compensation recovery",
        pass,
        &format!(
            "ideal mean {ideal:.4}, start {:.4}, first within-0.05 crossing at iteration {:?}, \
             value at 50 iterations {:.4}, runtime {elapsed:.2?}",
            trace[0],
            first_crossing,
            trace[50.min(trace.len() - 1)]
        ),
    );
}

#[test]
fn criterion_03_size_sweep_trend() {
    let mut spec = desk_scenario(10, 10, 100);
    spec.hwi = HwiSpec {
        psn: Some(PsnSpec::new(0.5).unwrap()),
        deformation: Some(
            DeformationSpec::new(0.1, std::f64::consts::PI, 0.0, 0.0, RowMode::Floor).unwrap(),
        ),
    };
    spec.labels = vec![
        EvalLabel::IdealStm,
        EvalLabel::ImpairedStm,
        EvalLabel::Compensated,
        EvalLabel::RandomConfig,
    ];

    let swept = sweep(&spec, SweepAxis::Reflectors, &[16.0, 64.0, 100.0, 144.0]).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    let mut previous_ideal = 0.0;
    for (n, out) in &swept {
        let mean = |l: EvalLabel| out.aggregate(l).unwrap().mean_relative_rate;
        let (ideal, comp) = (mean(EvalLabel::IdealStm), mean(EvalLabel::Compensated));
        let (impaired, random) = (mean(EvalLabel::ImpairedStm), mean(EvalLabel::RandomConfig));
        let ordered = ideal >= comp && comp >= impaired && impaired >= random;
        let close = *n < 100.0 || (ideal - comp).abs() <= 0.02;
        pass &= ordered && close && ideal >= previous_ideal;
        previous_ideal = ideal;
        detail.push_str(&format!(
            "N={n}: ideal {ideal:.4} comp {comp:.4} impaired {impaired:.4} random {random:.4}; "
        ));
    }
    report(3, "size-sweep trend", pass, detail.trim_end_matches("; "));
}

/// Paired mean difference and its standard error between two scenario runs
/// of the impaired label (trials share seeds, so pairing by index is exact).
fn paired_gap(
    a: &ris_core::harness::ScenarioOutcome<f64>,
    b: &ris_core::harness::ScenarioOutcome<f64>,
) -> (f64, f64) {
    let diffs: Vec<f64> = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(ra, rb)| {
            ra.outcome(EvalLabel::ImpairedStm).unwrap().relative_rate
                - rb.outcome(EvalLabel::ImpairedStm).unwrap().relative_rate
        })
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_04_monotonic_degradation() {
    let mut base = desk_scenario(10, 10, 150);
    base.labels = vec![EvalLabel::IdealStm, EvalLabel::ImpairedStm];

    let mut pass = true;
    let mut detail = String::new();
    let mut check_axis = |name: &str, runs: Vec<ris_core::harness::ScenarioOutcome<f64>>| {
        for pair in runs.windows(2) {
            let (gap, se) = paired_gap(&pair[0], &pair[1]);
            let ok = gap > 0.0 && gap > 2.0 * se;
            pass &= ok;
            detail.push_str(&format!("{name}: gap {gap:.4} (2se {:.4}); ", 2.0 * se));
        }
    };

    let eps_runs: Vec<_> = sweep(&base, SweepAxis::Epsilon, &[1.0, 0.5, 0.1, 0.0])
        .unwrap()
        .into_iter()
        .map(|(_, out)| out)
        .collect();
    check_axis("epsilon", eps_runs);

    let mut deformed = base.clone();
    deformed.hwi.deformation = Some(
        DeformationSpec::new(0.1, std::f64::consts::PI, 0.0, 0.0, RowMode::Floor).unwrap(),
    );
    let k_runs: Vec<_> = sweep(&deformed, SweepAxis::KPeaks, &[1.0, 2.0])
        .unwrap()
        .into_iter()
        .map(|(_, out)| out)
        .collect();
    check_axis("k_peaks", k_runs);

    let mut tall = base.clone();
    tall.hwi.deformation = Some(
        DeformationSpec::new(0.1, 2.0 * std::f64::consts::PI, 0.0, 0.0, RowMode::Floor).unwrap(),
    );
    let h_runs: Vec<_> = sweep(&tall, SweepAxis::HMaxOverLambda, &[0.1, 0.2])
        .unwrap()
        .into_iter()
        .map(|(_, out)| out)
        .collect();
    check_axis("h_max", h_runs);

    report(
        4,
        "impairment monotonicity",
        pass,
        detail.trim_end_matches("; "),
    );
}

#[test]
fn criterion_05_adam_from_scratch() {
    let mut spec = desk_scenario(10, 10, 100);
    spec.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
    spec.init = CompensationInit::Zero;
    spec.optimizer = OptimizerOptions {
        method: Method::Adam,
        max_iters: 200,
        ..OptimizerOptions::default()
    };
    spec.labels = vec![EvalLabel::IdealStm, EvalLabel::Compensated];

    let out = run_scenario(&spec).unwrap();
    let ideal = out.aggregate(EvalLabel::IdealStm).unwrap().mean_relative_rate;
    let comp = out
        .aggregate(EvalLabel::Compensated)
        .unwrap()
        .mean_relative_rate;
    let pass = comp >= 0.9 * ideal;
    report(
        5,
        "from-scratch ADAM",
        pass,
        &format!("ideal mean {ideal:.4}, compensated mean {comp:.4}, ratio {:.4}", comp / ideal),
    );
}

#[test]
fn criterion_06_water_filling_kkt() {
    let mut stream = RandomStream::new(4242, 0);
    let mut worst_constraint: f64 = 0.0;
    let mut pass = true;
    for _ in 0..1000 {
        let k = 2 + (stream.next_u64() % 31) as usize;
        let gains: Vec<f64> = (0..k)
            .map(|_| {
                let u: f64 = stream.uniform(0.0, 1.0).unwrap();
                if u < 0.1 {
                    0.0
                } else {
                    u * u * 10.0
                }
            })
            .collect();
        if gains.iter().all(|&g| g == 0.0) {
            continue;
        }
        let noise: f64 = stream.uniform(0.01, 4.0).unwrap();
        let target: f64 = stream.uniform(0.01, 8.0).unwrap();
        let spec = OfdmSpec::new(k, 1, 1.0, noise, target).unwrap();
        let p = water_fill(&gains, &spec).unwrap();

        let mean = p.iter().sum::<f64>() / k as f64;
        worst_constraint = worst_constraint.max(((mean - target) / target).abs());
        pass &= ((mean - target) / target).abs() <= 1e-9;

        let mut level: Option<f64> = None;
        for (&pi, &g) in p.iter().zip(&gains) {
            if g == 0.0 {
                pass &= pi == 0.0;
                continue;
            }
            let floor = noise / g;
            if pi > 0.0 {
                let mu = pi + floor;
                match level {
                    Some(l) => pass &= (mu - l).abs() <= 1e-9 * l.max(1.0),
                    None => level = Some(mu),
                }
            }
        }
        if let Some(level) = level {
            for (&pi, &g) in p.iter().zip(&gains) {
                if pi == 0.0 && g > 0.0 {
                    pass &= noise / g >= level - 1e-9 * level.max(1.0);
                }
            }
        }
    }
    report(
        6,
        "water-filling KKT",
        pass,
        &format!("1000 random gain vectors, worst |<p>-P|/P = {worst_constraint:.2e}"),
    );
}

#[test]
fn criterion_07_stm_exactness() {
    let mut stream = RandomStream::new(777, 0);
    let mut pass = true;
    let mut worst_identity: f64 = 0.0;
    for _ in 0..400 {
        let m = 1 + (stream.next_u64() % 8) as usize; // M <= 8
        let n = 1 + (stream.next_u64() % 6) as usize;
        let k = m + (stream.next_u64() % 5) as usize;
        let mut h_d = vec![Complex::new(0.0, 0.0); k];
        let mut v = vec![vec![Complex::new(0.0, 0.0); k]; n];
        for tap in h_d.iter_mut().take(m) {
            *tap = Complex::new(stream.standard_normal(), stream.standard_normal());
        }
        for row in &mut v {
            for tap in row.iter_mut().take(m) {
                *tap = Complex::new(stream.standard_normal(), stream.standard_normal());
            }
        }
        let ch = ris_core::channel::ChannelRealization {
            direct_taps: h_d,
            composite_taps: v,
            tap_count: m,
        };
        let out = stm_configure(&ch).unwrap();

        // Alignment identity at the chosen tap.
        let aligned = ch.direct_taps[out.m_star]
            + ch.composite_taps
                .iter()
                .zip(out.config.coefficients())
                .map(|(row, w)| row[out.m_star] * w)
                .sum::<Complex<f64>>();
        let magnitude_sum = ch.direct_taps[out.m_star].norm()
            + ch.composite_taps
                .iter()
                .map(|row| row[out.m_star].norm())
                .sum::<f64>();
        let rel = (aligned.norm() - magnitude_sum).abs() / magnitude_sum;
        worst_identity = worst_identity.max(rel);
        pass &= rel <= 1e-10;

        // Exhaustive search over taps.
        let mut best = (0usize, f64::NEG_INFINITY);
        for tap in 0..m {
            let sum = ch.direct_taps[tap].norm()
                + ch.composite_taps
                    .iter()
                    .map(|row| row[tap].norm())
                    .sum::<f64>();
            if sum * sum > best.1 {
                best = (tap, sum * sum);
            }
        }
        pass &= out.m_star == best.0;
    }
    report(
        7,
        "STM exactness",
        pass,
        &format!("400 instances with M <= 8, worst alignment error {worst_identity:.2e}"),
    );
}

#[test]
fn criterion_08_psn_passivity() {
    let n = 100_000;
    let omega: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::from_polar(1.0, i as f64 * 0.1))
        .collect();
    let mut pass = true;
    let mut detail = String::new();
    for (tag, eps) in [(0u64, 0.0), (1, 0.3), (2, 0.7), (3, 1.0)] {
        let mut stream = RandomStream::new(888, tag);
        let noisy = apply_psn(&omega, &PsnSpec::new(eps).unwrap(), &mut stream);
        let mean = noisy.iter().map(|w| w.norm_sqr()).sum::<f64>() / n as f64;
        pass &= (mean - 1.0).abs() <= 0.01;
        detail.push_str(&format!("eps {eps}: {mean:.4}; "));
    }
    report(8, "PSN passivity", pass, detail.trim_end_matches("; "));
}

#[test]
fn criterion_09_bound_dominance() {
    let mut pass = true;
    let mut worst_rel: f64 = 0.0;
    for (idx, (rows, cols)) in [(4usize, 4usize), (2, 8), (3, 3)].iter().enumerate() {
        let mut spec = desk_channel(*rows, *cols);
        spec.paths_ap_ris = 7;
        spec.paths_ris_ue = 5;
        spec.paths_direct = 6;
        let k = 64;
        let mut ch_stream = RandomStream::new(909, idx as u64);
        let ch = channel::realize(&spec, k, 10.5e6, &mut ch_stream).unwrap();
        let ofdm = OfdmSpec::new(
            k,
            ch.tap_count,
            10.5e6,
            dbm_to_watts(-164.0),
            dbm_to_watts(30.0),
        )
        .unwrap();
        let ones = vec![Complex::new(1.0, 0.0); ch.n_elements()];
        let resp = SubcarrierResponse::build(&ch, &ones).unwrap();
        let bound = coherent_upper_bound_from(&resp, &ofdm).unwrap();

        let mut stream = RandomStream::new(910, idx as u64);
        for _ in 0..1000 {
            let omega: Vec<Complex<f64>> = (0..ch.n_elements())
                .map(|_| {
                    Complex::from_polar(
                        1.0,
                        stream
                            .uniform(-std::f64::consts::PI, std::f64::consts::PI)
                            .unwrap(),
                    )
                })
                .collect();
            let gains = resp.recombined_gains(&omega).unwrap();
            let rate = water_filled_rate(&gains, &ofdm).unwrap();
            let rel = relative_rate(rate, bound).unwrap();
            pass &= rel > 0.0 && rel <= 1.0;
            worst_rel = worst_rel.max(rel);
        }
    }
    report(
        9,
        "bound dominance",
        pass,
        &format!("3000 random unit-modulus configurations, max relative rate {worst_rel:.6}"),
    );
}
