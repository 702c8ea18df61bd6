use nwfd_core::analysis::{harmonic_inversion_real, HarminvOptions};

fn main() {
    let f1 = 0.25 / 160.0;
    let df = 5.0 * f1 / 1e3;
    let f2 = f1 + df;
    let dt = 1.0 / f1 / 96.0;
    let n = (600.0 / (f1 * dt)) as usize;
    let w1 = 2.0 * std::f64::consts::PI * f1;
    let w2 = 2.0 * std::f64::consts::PI * f2;
    let g1 = w1 / 2e3;
    let g2 = w2 / 2e5;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            (-g1 * t).exp() * (w1 * t).cos() + 0.7 * (-g2 * t).exp() * (w2 * t + 0.3).cos()
        })
        .collect();
    let out = harmonic_inversion_real(&x, dt, (0.95 * f1, 1.05 * f2), &HarminvOptions::default()).unwrap();
    println!("f1={f1:.8e} f2={f2:.8e}");
    for m in &out.modes {
        println!("f={:.8e} q={:.4e} amp={:.4e} err_f1={:.2e} err_f2={:.2e}", m.frequency, m.q, m.amplitude,
            (m.frequency-f1).abs()/f1, (m.frequency-f2).abs()/f2);
    }
}
