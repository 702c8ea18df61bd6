//! Vacuum Bloch dispersion check: extracted frequency at +/-k must match
//! each other and the exact discrete plane-wave dispersion.

use nwfd_core::analysis::{harmonic_inversion, HarminvOptions};
use nwfd_core::fdtd::{run, AxisKind, Component, ProbeSpec, PulseKind, SimulationPlan, SourceSpec};
use nwfd_core::geometry::{sample_structure, GridSpec, Material, MaterialStack, StructureKind};
use std::sync::Arc;

fn main() {
    let dx = 8.0;
    let nx = 20;
    let grid = GridSpec { origin: [0.0, 0.0, 0.0], dims: [nx, 1, 1], dx };
    let eps = Arc::new(
        sample_structure(
            &StructureKind::Uniform(Material::Air),
            &MaterialStack::default(),
            grid,
            160.0 / dx,
            false,
            None,
        )
        .unwrap()
        .eps,
    );
    let length = nx as f64 * dx;
    let courant: f64 = 0.45;
    for kn in [0.3f64, -0.3] {
        let k = kn * 2.0 * std::f64::consts::PI / length;
        let mut plan = SimulationPlan::new(eps.clone());
        plan.courant = courant;
        plan.x = AxisKind::Bloch { k };
        plan.y = AxisKind::Periodic;
        plan.z = AxisKind::Periodic;
        // Fundamental mode frequency ~ |k|/2pi in vacuum.
        let f0 = k.abs() / (2.0 * std::f64::consts::PI);
        plan.sources.push(SourceSpec {
            position: [52.0, 0.0, 0.0],
            component: Component::Ey,
            center_freq: f0,
            bandwidth: 0.5 * f0,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
        plan.probes.push(ProbeSpec { position: [100.0, 0.0, 0.0], component: Component::Ey });
        plan.run_time = 60.0 / f0;
        let res = run(&plan).unwrap();
        let start = (res.source_off_time / res.dt).ceil() as usize;
        let out = harmonic_inversion(
            &res.probes[0].series[start..],
            res.dt,
            (0.3 * f0, 2.0 * f0),
            &HarminvOptions { min_periods: 10.0, ..HarminvOptions::default() },
        )
        .unwrap();
        // Exact discrete dispersion: sin(w dt / 2) = S sin(k dx / 2).
        let dt = courant * dx;
        let rhs = courant * (k * dx / 2.0).sin().abs();
        let f_exact = (rhs.asin() * 2.0 / dt) / (2.0 * std::f64::consts::PI);
        println!("k_norm = {kn}: exact {f_exact:.9e}");
        for m in out.modes.iter().take(3) {
            println!(
                "   f = {:.9e} (err {:+.2e})  q = {:.2e}  amp = {:.3e}",
                m.frequency,
                m.frequency / f_exact - 1.0,
                m.q,
                m.amplitude
            );
        }
    }
}
