use super::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

/// `ln C(n, j) + j ln p`, accumulated term by term without log-gamma.
fn ln_terms(n: u64, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(acc);
    for j in 1..=n {
        acc += ((n - j + 1) as f64).ln() - (j as f64).ln() + p.ln();
        out.push(acc);
    }
    out
}

fn scan_m(p_fail: f64, k: u64, p_l: f64) -> u64 {
    let n = 2 * k;
    let terms = ln_terms(n, p_fail);
    (0..n).find(|&m| terms[m as usize + 1] < p_l.ln()).unwrap_or(n)
}

/// `P[Binomial(n, p) >= j]`, summed in log space.
fn ln_tail(n: u64, p: f64, j: u64) -> f64 {
    let terms = ln_terms(n, p);
    let q = (1.0 - p).ln();
    let logs: Vec<f64> = (j..=n).map(|i| terms[i as usize] + (n - i) as f64 * q).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

fn grid() -> Vec<(f64, u64, f64)> {
    let mut out = Vec::new();
    for i in 0..10 {
        let p_fail = 10f64.powf(-6.0 + 5.0 * i as f64 / 9.0);
        for j in 0..10 {
            let k = 10f64.powf(4.0 * j as f64 / 9.0).round() as u64;
            for p_l in [1e-9, 1e-12, 1e-15] {
                out.push((p_fail, k, p_l));
            }
        }
    }
    out
}

#[test]
fn logical_rate_examples() {
    for d in [3, 9, 29] {
        assert!(close(logical_error_rate(1e-2, d), 0.1, 1e-12));
    }
    assert!(close(logical_error_rate(1e-4, 15), 1e-17, 1e-9));
    assert!(close(logical_error_rate(1e-3, 29), 1e-16, 1e-9));
    // far below f64 range only the log form survives
    assert_eq!(logical_error_rate(1e-5, 401), 0.0);
    assert!(close(ln_logical_error_rate(1e-5, 401), 0.1f64.ln() + 201.0 * 1e-3f64.ln(), 1e-12));
    assert!(close(logical_error_rate(1e-5, 201).ln(), ln_logical_error_rate(1e-5, 201), 1e-9));
    for d in (3..40).step_by(2) {
        assert!(logical_error_rate(3e-3, d + 2) < logical_error_rate(3e-3, d));
    }
}

#[test]
fn distances_of_the_provisioning_table() {
    let expected = [
        (1e-15, [29, 15, 9]),
        (1e-12, [23, 11, 7]),
        (1e-9, [17, 7, 5]),
    ];
    for (target, ds) in expected {
        for (p, d) in [1e-3, 1e-4, 1e-5].into_iter().zip(ds) {
            assert_eq!(select_distance(p, target), Ok(d), "p={p} target={target}");
        }
    }
    assert_eq!(select_distance(1e-2, 1e-9), Err(ResourceError::AboveThreshold(1e-2)));
    assert_eq!(select_distance(0.2, 1e-9), Err(ResourceError::AboveThreshold(0.2)));
    assert!(select_distance(1e-3, 1.5).is_err());
    // non-increasing in the target
    let mut last = 3;
    for e in 3..20 {
        let d = select_distance(2e-3, 10f64.powi(-e)).unwrap();
        assert!(d >= last && d % 2 == 1);
        last = d;
    }
}

#[test]
fn bandwidth_examples() {
    assert!(close(bandwidth_per_qubit(27, 1e-6) * 1e4, 7.28e12, 1e-12));
    assert!(close(bandwidth_per_qubit(29, 1e-6) * 100.0, 8.4e10, 1e-12));
    assert!(close(bandwidth_per_qubit(3, 1e-6), 8e6, 1e-12));
    assert_eq!(format_bandwidth(8.4e10), "84 GBit/s");
    assert_eq!(format_bandwidth(2.7e9), "2.7 GBit/s");
}

#[test]
fn exact_m_matches_direct_scan() {
    assert_eq!(max_concurrent_failures(0.0, 100, 1e-15), 0);
    assert_eq!(max_concurrent_failures(1.0, 100, 1e-15), 200);
    assert_eq!(max_concurrent_failures(1.0, 1, 0.5), 2);
    for (p_fail, k, p_l) in grid() {
        assert_eq!(max_concurrent_failures(p_fail, k, p_l), scan_m(p_fail, k, p_l), "{p_fail} {k} {p_l}");
    }
    let m = max_concurrent_failures(1e-3, 100, 1e-15);
    assert_eq!(m, scan_m(1e-3, 100, 1e-15));
    assert!(m > 0 && m < 200);
}

#[test]
fn m_is_monotone() {
    for p_l in [1e-9, 1e-15] {
        for k in [1, 10, 100, 1000] {
            let mut last = 0;
            for i in 0..=40 {
                let p_fail = i as f64 / 40.0;
                let m = max_concurrent_failures(p_fail, k, p_l);
                assert!(m >= last);
                last = m;
            }
        }
        for i in 1..10 {
            let p_fail = i as f64 / 10.0;
            let mut last = 0;
            for k in 1..60 {
                let m = max_concurrent_failures(p_fail, k, p_l);
                assert!(m >= last);
                last = m;
            }
        }
    }
}

#[test]
fn chernoff_m_bounds_the_true_tail() {
    assert_eq!(chernoff_upper_bound_m(0.0, 100, 1e-15), 0);
    assert_eq!(chernoff_upper_bound_m(1.0, 100, 1e-15), 200);
    let small = chernoff_upper_bound_m(0.5, 1, 0.1);
    assert!(small <= 2);
    assert!(small >= max_concurrent_failures(0.5, 1, 0.1));
    for (p_fail, k, p_l) in grid() {
        let m = chernoff_upper_bound_m(p_fail, k, p_l);
        let n = 2 * k;
        assert!(m <= n);
        if m < n {
            assert!(ln_tail(n, p_fail, m + 1) < p_l.ln(), "{p_fail} {k} {p_l}");
            assert!(m == 0 || (m as f64 + 1.0) / n as f64 > p_fail);
        }
        // one less would break the Chernoff condition
        if m > 0 && (m as f64) / (n as f64) > p_fail {
            let a = m as f64 / n as f64;
            assert!(-(n as f64) * binary_kl(a, p_fail) >= p_l.ln());
        }
    }
}

#[test]
fn binary_kl_values() {
    assert_eq!(binary_kl(0.3, 0.3), 0.0);
    assert!(close(binary_kl(1.0, 0.25), 4f64.ln(), 1e-12));
    assert!(close(binary_kl(0.5, 0.25), 0.5 * 2f64.ln() + 0.5 * (2.0 / 3.0f64).ln(), 1e-12));
}

#[test]
fn saturated_report_equals_naive_design() {
    let r = requirement_report(&SystemParams::new(1e-3, 1e-15, 100, 1.0)).unwrap();
    assert_eq!((r.d, r.m, r.dec_units_lazy, r.dec_units_naive), (29, 200, 200, 200));
    assert!(close(r.bw_required, 8.4e10, 1e-12));
    assert_eq!(r.bw_required, r.bw_no_lazy);
    assert_eq!(r.savings_fraction, 0.0);
    let c = requirement_report_with(
        &SystemParams::new(1e-3, 1e-15, 100, 1.0),
        ReportOptions { method: MMethod::Chernoff, ..Default::default() },
    )
    .unwrap();
    assert_eq!(c, r);
    let literal = requirement_report_with(
        &SystemParams::new(1e-3, 1e-15, 100, 1.0),
        ReportOptions { task_bandwidth: TaskBandwidth::FullQubit, ..Default::default() },
    )
    .unwrap();
    assert!(close(literal.bw_required, 1.68e11, 1e-12));
}

#[test]
fn quiet_report_needs_nothing() {
    for k in [1, 100, 10_000] {
        let r = requirement_report(&SystemParams::new(1e-4, 1e-12, k, 0.0)).unwrap();
        assert_eq!((r.m, r.bw_required, r.savings_fraction), (0, 0.0, 1.0));
        assert_eq!(r.d, 11);
    }
}

#[test]
fn report_errors_and_json() {
    assert_eq!(
        requirement_report(&SystemParams::new(0.02, 1e-15, 100, 0.1)),
        Err(ResourceError::AboveThreshold(0.02))
    );
    assert!(requirement_report(&SystemParams::new(1e-3, 1e-15, 0, 0.1)).is_err());
    assert!(requirement_report(&SystemParams::new(1e-3, 1e-15, 10, 1.5)).is_err());
    let mut bad_tau = SystemParams::new(1e-3, 1e-15, 10, 0.1);
    bad_tau.tau = 0.0;
    assert!(requirement_report(&bad_tau).is_err());

    let r = requirement_report(&SystemParams::new(1e-4, 1e-15, 10_000, 1e-3)).unwrap();
    let json = serde_json::to_value(r).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    for key in ["d", "p_L", "M", "bw_required", "bw_no_lazy", "dec_units_lazy", "dec_units_naive", "savings_fraction"] {
        assert!(keys.contains(&key), "{key}");
    }
    assert!(r.bw_required <= r.bw_no_lazy);
    assert!((0.0..=1.0).contains(&r.savings_fraction));
}

#[test]
fn table_lists_every_cell() {
    let mut rows = Vec::new();
    for (p, p_fail) in [(1e-3, 1.0), (1e-4, 0.01)] {
        for k in [100, 1000] {
            let report = requirement_report(&SystemParams::new(p, 1e-15, k, p_fail)).unwrap();
            rows.push(RequirementRow { p_target: 1e-15, p, k, p_fail, report });
        }
    }
    let text = render_table(&rows);
    assert!(text.contains("K = 100") && text.contains("K = 1000"));
    assert!(text.contains("84 GBit/s") && text.contains("840 GBit/s"));
    assert!(text.contains("200 dec. units") && text.contains("save 0.0%"));
    assert!(text.contains("d = 15"));
}

