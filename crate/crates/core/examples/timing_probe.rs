use std::time::Instant;
use z2lpg::*;

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn main() {
    // --- analog L=4 PBC quenches ---
    let spec = LatticeSpec::new(4, Boundary::Periodic);
    let space = HilbertSpace::build(spec, Some(2)).unwrap();
    let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
    let psi0 = build_initial_state(&space, &InitialPattern::Staggered).unwrap();

    // criterion 3: early-time slope at V=16
    let params = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
    let config = QuenchConfig {
        t_max: 0.12,
        sample_interval: 0.002,
        ..QuenchConfig::default()
    };
    let t0 = Instant::now();
    let series = run_quench(&space, &params, &seq, &psi0, &config, HamiltonianVariant::Faulty)
        .unwrap();
    let mut xs = vec![];
    let mut ys = vec![];
    for (k, &t) in series.times.iter().enumerate() {
        if (0.01..=0.1).contains(&t) {
            let inst = 1.0 - series.sum_g[k] / 4.0;
            xs.push(t.ln());
            ys.push(inst.ln());
        }
    }
    println!("slope fit (V=16): {:.4}  [{:?}]", fit_slope(&xs, &ys), t0.elapsed());

    // criteria 4/5/6: plateaus at V = 32, 64, 128; two-regime vs V=1, 100
    let run_v = |v: f64, dt: f64, t_max: f64| {
        let params = ModelParams::analog(1.0, 0.3, 1.0, v);
        let config = QuenchConfig {
            t_max,
            sample_interval: dt,
            ..QuenchConfig::default()
        };
        run_quench(&space, &params, &seq, &psi0, &config, HamiltonianVariant::Faulty).unwrap()
    };
    let t0 = Instant::now();
    let mut plateaus = vec![];
    let mut onsets = vec![];
    for v in [32.0, 64.0, 128.0] {
        let s = run_v(v, 0.002, 10.0);
        let n = s.len();
        let tail = &s.eps_avg[n - n / 5..];
        let plateau = median(tail);
        let e_final = *s.eps_avg.last().unwrap();
        let mut onset_idx = 0;
        for k in (0..n).rev() {
            if (s.eps_avg[k] - e_final).abs() > 0.2 * e_final {
                onset_idx = k + 1;
                break;
            }
        }
        plateaus.push(plateau);
        onsets.push(s.times[onset_idx]);
        println!("V={v}: plateau {plateau:.4e}, onset {:.3}", s.times[onset_idx]);
    }
    println!(
        "plateau ratios: {:.2}, {:.2}; onset ratios: {:.2}, {:.2}  [{:?}]",
        plateaus[0] / plateaus[1],
        plateaus[1] / plateaus[2],
        onsets[0] / onsets[1],
        onsets[1] / onsets[2],
        t0.elapsed()
    );
    let s1 = run_v(1.0, 0.01, 10.0);
    let s100 = run_v(100.0, 0.002, 10.0);
    println!(
        "two-regime: eps(V=1, t=10) = {:.4e}, eps(V=100, t=10) = {:.4e}, ratio {:.1}",
        s1.eps_avg.last().unwrap(),
        s100.eps_avg.last().unwrap(),
        s1.eps_avg.last().unwrap() / s100.eps_avg.last().unwrap()
    );

    // criterion 7: Zeno restoration, staggered
    let t0 = Instant::now();
    let config = QuenchConfig {
        t_max: 10.0,
        sample_interval: 0.01,
        ..QuenchConfig::default()
    };
    let adj = run_quench(
        &space,
        &ModelParams::analog(1.0, 0.3, 1.0, 0.0),
        &seq,
        &psi0,
        &config,
        HamiltonianVariant::Adjusted,
    )
    .unwrap();
    let max_dev = |a: &TimeSeries, b: &TimeSeries, col: fn(&TimeSeries) -> &Vec<f64>| {
        col(a)
            .iter()
            .zip(col(b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    let f16 = run_v(16.0, 0.01, 10.0);
    let f32v = run_v(32.0, 0.01, 10.0);
    let f0 = run_v(0.0, 0.01, 10.0);
    println!(
        "zeno n_stag: dev(V=16) = {:.4e}, dev(V=0) = {:.4e}, ratio {:.1}",
        max_dev(&f16, &adj, |s| &s.n_stag),
        max_dev(&f0, &adj, |s| &s.n_stag),
        max_dev(&f0, &adj, |s| &s.n_stag) / max_dev(&f16, &adj, |s| &s.n_stag)
    );
    println!(
        "zeno E: dev(V=32) = {:.4e}, dev(V=0) = {:.4e}, ratio {:.1}  [{:?}]",
        max_dev(&f32v, &adj, |s| &s.e_flux),
        max_dev(&f0, &adj, |s| &s.e_flux),
        max_dev(&f0, &adj, |s| &s.e_flux) / max_dev(&f32v, &adj, |s| &s.e_flux),
        t0.elapsed()
    );

    // criterion 10: circuit regime map
    let t0 = Instant::now();
    let spec6 = LatticeSpec::new(6, Boundary::Open);
    let seq11 = make_sequence(SequencePreset::Elevenths).unwrap();
    let psi0c = circuit_initial_state(&spec6, &InitialPattern::Staggered).unwrap();
    let config = CircuitConfig {
        dt: 0.2,
        n_steps: 100,
        params: ModelParams::circuit(1.0, 0.3, 0.1, 0.0),
        seq: seq11.clone(),
        sample_every: 1,
    };
    let table = scan_final_violation(
        &spec6,
        &config,
        &psi0c,
        &[1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.85, 12.0],
    )
    .unwrap();
    for (v, ef) in &table {
        println!("  V = {v}: eps_f = {ef:.4e}");
    }
    println!("scan [{:?}]", t0.elapsed());

    // criterion 11: digital vs analog
    let t0 = Instant::now();
    let space6 = HilbertSpace::build(spec6.clone(), Some(3)).unwrap();
    let psi0a = build_initial_state(&space6, &InitialPattern::Staggered).unwrap();
    for v in [1.0, 4.0] {
        let params = ModelParams::circuit(1.0, 0.3, 0.1, v);
        let h = build_faulty_hamiltonian(&space6, &params, &seq11).unwrap();
        let prop = DensePropagator::new(&h).unwrap();
        let w = prop.to_eigenbasis(&psi0a);
        let eval = ObservableEvaluator::new(&space6);
        let mut errs = vec![];
        for dt in [0.2, 0.1] {
            let config = CircuitConfig {
                dt,
                n_steps: (20.0 / dt) as usize,
                params,
                seq: seq11.clone(),
                sample_every: 1,
            };
            let dig = run_circuit(&spec6, &config, &psi0c).unwrap();
            let mut max_err = 0.0f64;
            for (k, &t) in dig.times.iter().enumerate() {
                let psi = prop.from_eigenbasis(&w, t);
                let obs = eval.evaluate(&psi);
                max_err = max_err.max((dig.eps_raw[k] - obs.violation_interior).abs());
            }
            errs.push(max_err);
            println!("  V={v} dt={dt}: max |eps_raw digital - analog| = {max_err:.4e}");
        }
        println!("  V={v}: shrink factor {:.2}", errs[0] / errs[1]);
    }
    println!("digital-analog [{:?}]", t0.elapsed());

    // order fit at t = 2/J, V = 2
    let params2 = ModelParams::circuit(1.0, 0.3, 0.1, 2.0);
    let h = build_faulty_hamiltonian(&space6, &params2, &seq11).unwrap();
    let prop = DensePropagator::new(&h).unwrap();
    let w = prop.to_eigenbasis(&psi0a);
    let eval = ObservableEvaluator::new(&space6);
    let mut xs = vec![];
    let mut ys = vec![];
    for dt in [0.2, 0.1, 0.05, 0.025] {
        let config = CircuitConfig {
            dt,
            n_steps: (2.0 / dt) as usize,
            params: params2,
            seq: seq11.clone(),
            sample_every: (0.2 / dt) as usize,
        };
        let dig = run_circuit(&spec6, &config, &psi0c).unwrap();
        let mut max_err = 0.0f64;
        for (k, &t) in dig.times.iter().enumerate() {
            let psi = prop.from_eigenbasis(&w, t);
            let obs = eval.evaluate(&psi);
            max_err = max_err.max((dig.eps_raw[k] - obs.violation_interior).abs());
        }
        xs.push(dt.ln());
        ys.push(max_err.ln());
        println!("  order fit dt={dt}: err {max_err:.4e}");
    }
    println!("trotter order: {:.3}", fit_slope(&xs, &ys));
}
