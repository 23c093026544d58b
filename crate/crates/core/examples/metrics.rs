//! Evaluates the metric formulas on small hand-made inputs.

use lorawan_psc::metrics::{self, RestorationInputs};

fn main() {
    let kappa = std::f64::consts::LN_2 / 3600.0;
    let e_r = [0.012, 0.020, 0.004];
    let e_norm = metrics::normalize_over_servers(&e_r);
    let a_norm = metrics::normalize_over_servers(&[30.0, 12.0, 45.0]);
    println!("energy restoration of one server {:.6}", metrics::energy_restoration(0.024, 0.018, 0.0337, kappa, 1800.0));
    println!("normalised energy {e_norm:?}\nnormalised memory {a_norm:?}");

    let r = metrics::resource_restoration(&RestorationInputs {
        k_closed: 10,
        k_total: 100,
        links_active: 261,
        links_total: 1211,
        e_r_norm: e_norm,
        a_r_norm: a_norm,
        n1: 0.5,
        n2: 0.3,
    })
    .unwrap();
    println!("network restoration {r:.6}");

    let (gamma, gamma_prime) = metrics::mean_lifetime(100, 10, 100).unwrap();
    println!("mean lifetime {gamma:.6} s per app, {gamma_prime:.4} s over all slots");
    println!("survivability {}", metrics::survivability(0.02, &[0.004, 0.006]).as_str());

    let times: Vec<f64> = (0..=10).map(|k| 360.0 * k as f64).collect();
    let mem: Vec<f64> = times.iter().map(|t| 0.9 - t / 10_000.0).collect();
    let energy: Vec<f64> = times.iter().map(|t| 0.8 - t / 8_000.0).collect();
    let (s_mem, s_energy, s_avg) = metrics::average_sustainability(&times, &mem, &energy).unwrap();
    println!("sustainability memory {s_mem:.4} energy {s_energy:.4} average {s_avg:.4}");
    println!("continuity with 0.03 J left at 0.012 J per step over 5 steps: {:.3}", metrics::continuity_ratio(0.03, 0.012, 5));
}
