use z2lpg::*;

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn main() {
    let spec = LatticeSpec::new(4, Boundary::Periodic);
    let space = HilbertSpace::build(spec, Some(2)).unwrap();
    let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
    let psi0 = build_initial_state(&space, &InitialPattern::Staggered).unwrap();

    // 1. slope vs window and V
    for v in [0.0, 1.0, 16.0] {
        let params = ModelParams::analog(1.0, 0.3, 1.0, v);
        let config = QuenchConfig {
            t_max: 0.12,
            sample_interval: 0.0005,
            ..QuenchConfig::default()
        };
        let s = run_quench(&space, &params, &seq, &psi0, &config, HamiltonianVariant::Faulty)
            .unwrap();
        for (lo, hi) in [(0.001, 0.01), (0.01, 0.1), (0.01, 0.05)] {
            let mut xs = vec![];
            let mut ys = vec![];
            for (k, &t) in s.times.iter().enumerate() {
                if t >= lo && t <= hi {
                    xs.push(t.ln());
                    ys.push((1.0 - s.sum_g[k] / 4.0).ln());
                }
            }
            println!("V={v} window [{lo},{hi}]: slope {:.4}", fit_slope(&xs, &ys));
        }
    }

    // 2. onset curves: dump eps_avg early
    for v in [32.0, 64.0, 128.0] {
        let params = ModelParams::analog(1.0, 0.3, 1.0, v);
        let config = QuenchConfig {
            t_max: 10.0,
            sample_interval: 0.002,
            ..QuenchConfig::default()
        };
        let s = run_quench(&space, &params, &seq, &psi0, &config, HamiltonianVariant::Faulty)
            .unwrap();
        let ef = *s.eps_avg.last().unwrap();
        print!("V={v} ef={ef:.4e} | eps/ef at t=");
        for t_probe in [0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0, 2.0] {
            let k = (t_probe / 0.002).round() as usize;
            print!("{t_probe}:{:.2} ", s.eps_avg[k] / ef);
        }
        // last time outside the 20% band
        let mut onset_idx = 0;
        for k in (0..s.len()).rev() {
            if (s.eps_avg[k] - ef).abs() > 0.2 * ef {
                onset_idx = k + 1;
                break;
            }
        }
        println!("| onset {:.3}", s.times[onset_idx]);
    }

    // 3. zeno deviation vs V, max and windowed metrics
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
    for v in [0.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
        let params = ModelParams::analog(1.0, 0.3, 1.0, v);
        let f = run_quench(&space, &params, &seq, &psi0, &config, HamiltonianVariant::Faulty)
            .unwrap();
        let dev_max = f
            .n_stag
            .iter()
            .zip(&adj.n_stag)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let dev_t3 = f
            .n_stag
            .iter()
            .zip(&adj.n_stag)
            .take(300)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let dev_e = f
            .e_flux
            .iter()
            .zip(&adj.e_flux)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!(
            "V={v}: max|dn_stag| t<=10: {dev_max:.4e}  t<=3: {dev_t3:.4e}  max|dE|: {dev_e:.4e}"
        );
    }

    // 4. trotter order with all observables, smaller dt ladder, V=2 and V=4
    let spec6 = LatticeSpec::new(6, Boundary::Open);
    let space6 = HilbertSpace::build(spec6.clone(), Some(3)).unwrap();
    let seq11 = make_sequence(SequencePreset::Elevenths).unwrap();
    let psi0a = build_initial_state(&space6, &InitialPattern::Staggered).unwrap();
    let psi0c = circuit_initial_state(&spec6, &InitialPattern::Staggered).unwrap();
    let eval = ObservableEvaluator::new(&space6);
    for v in [2.0, 4.0] {
        let params = ModelParams::circuit(1.0, 0.3, 0.1, v);
        let h = build_faulty_hamiltonian(&space6, &params, &seq11).unwrap();
        let prop = DensePropagator::new(&h).unwrap();
        let w = prop.to_eigenbasis(&psi0a);
        let mut xs = vec![];
        let mut ys = vec![];
        for dt in [0.2, 0.1, 0.05, 0.025, 0.0125] {
            let config = CircuitConfig {
                dt,
                n_steps: (2.0 / dt).round() as usize,
                params,
                seq: seq11.clone(),
                sample_every: (0.2 / dt).round() as usize,
            };
            let dig = run_circuit(&spec6, &config, &psi0c).unwrap();
            let mut err_eps = 0.0f64;
            let mut err_n = 0.0f64;
            let mut err_e = 0.0f64;
            for (k, &t) in dig.times.iter().enumerate() {
                let psi = prop.from_eigenbasis(&w, t);
                let obs = eval.evaluate(&psi);
                err_eps = err_eps.max((dig.eps_raw[k] - obs.violation_interior).abs());
                err_n = err_n.max((dig.n_stag[k] - obs.n_stag).abs());
                err_e = err_e.max((dig.e_flux[k] - obs.e_flux).abs());
            }
            let err = err_eps.max(err_n).max(err_e);
            println!(
                "V={v} dt={dt}: eps {err_eps:.3e}  n {err_n:.3e}  E {err_e:.3e}  max {err:.3e}"
            );
            xs.push(dt.ln());
            ys.push(err.ln());
        }
        println!(
            "V={v}: order (all 5 pts) {:.3}, (last 4) {:.3}",
            fit_slope(&xs, &ys),
            fit_slope(&xs[1..], &ys[1..])
        );
    }
}
