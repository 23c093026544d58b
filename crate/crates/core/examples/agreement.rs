//! Walks through the self-enforcing agreement calculus: availability, expected
//! gains and the reset / continue / expand decisions for memory and energy.

use lorawan_psc::agreement::{self, Strictness};

fn main() {
    let (ratio, congested) = agreement::clamp_ratio(420.0, 1000.0);
    println!("memory ratio {ratio} congested={congested}");
    let p = agreement::memory_availability_probability(&[0.42, 0.55, 0.61]).unwrap();
    println!("availability probability {p:.4}");

    // A server whose resource decays slowly keeps more mass beyond the session.
    let session_steps = 10;
    for rate in [0.0, 1e-4, 1e-3] {
        let series = agreement::exponential_series(rate, 360.0, 20);
        let q = agreement::q_tail_probability(&series, session_steps);
        println!("rate {rate:>7}: tail probability {q:.4}");
    }

    let q = 0.4;
    let surplus = [120.0, 80.0, 45.0];
    println!("expected memory gain {:.2} MB", agreement::expected_memory_gain(q, &surplus));
    for (extra, tail) in [(300.0, vec![60.0, 60.0]), (400.0, vec![70.0, 50.0]), (100.0, vec![60.0])] {
        let d = agreement::memory_decision(q, extra, &tail);
        println!("memory decision: value {:+.3} -> {}", d.value, d.label.as_str());
    }

    let consumed = agreement::energy_consumed(&[(33.724e-6, 360.0), (33.724e-6, 200.0)]);
    println!("energy consumed {consumed:.6} J");
    let kappa = std::f64::consts::LN_2 / 3600.0;
    println!("degradation ok at 30 min: {}", agreement::degradation_ok(0.02, 0.0337, kappa, 1800.0));

    let need = [0.004, 0.003];
    for s in [Strictness::AtMost, Strictness::MuchSmaller(0.5)] {
        println!("requirement {:?}: {}", s, agreement::energy_requirement_ok(&need, 0.012, s));
    }
    for (with, without) in [(0.02, 0.015), (0.015, 0.015), (0.01, 0.015)] {
        let d = agreement::energy_decision(0.7, with, without);
        println!("energy decision: value {:+.5} -> {}", d.value, d.label.as_str());
    }
}
