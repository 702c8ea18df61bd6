//! Patterned-slab Bloch runs at +/-k: list extracted modes.

use nwfd_core::analysis::{harmonic_inversion, HarminvOptions};
use nwfd_core::fdtd::{run, AxisKind, Component, ProbeSpec, PulseKind, SimulationPlan, SourceSpec};
use nwfd_core::geometry::{
    build_periodic_layout, sample_structure, DeviceSpec, GridSpec, MaterialStack, StructureKind,
};
use std::sync::Arc;

fn main() {
    let dx = 8.0_f64;
    let spacing = 160.0_f64;
    let spec = DeviceSpec::default();
    let nx = (spacing / dx).round() as usize;
    let ny = (700.0_f64 / dx).round() as usize;
    let grid = GridSpec {
        origin: [0.0, -(ny as f64) * dx / 2.0, 0.0],
        dims: [nx, ny, 1],
        dx,
    };
    let layout = build_periodic_layout(&spec, spacing, 1).unwrap();
    let kind = StructureKind::VerticalSlab { layout, width: spec.width };
    let eps = Arc::new(
        sample_structure(&kind, &MaterialStack::default(), grid, spacing / dx, true, Some(spacing))
            .unwrap()
            .eps,
    );
    let f0 = 0.26 / spacing;
    let k_full = 2.0 * std::f64::consts::PI / spacing;
    for kn in [0.3, -0.3, 1.3] {
        let mut plan = SimulationPlan::new(eps.clone());
        plan.courant = 0.45;
        plan.x = AxisKind::Bloch { k: kn * k_full };
        plan.y = AxisKind::pml_faces(120.0);
        plan.z = AxisKind::Periodic;
        plan.sources.push(SourceSpec {
            position: [37.0, 11.0, 0.0],
            component: Component::Ey,
            center_freq: f0,
            bandwidth: 0.35 * f0,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
        plan.probes.push(ProbeSpec { position: [61.0, 17.0, 0.0], component: Component::Ey });
        plan.run_time = 150_000.0;
        let res = run(&plan).unwrap();
        let start = (res.source_off_time / res.dt).ceil() as usize;
        let out = harmonic_inversion(
            &res.probes[0].series[start..],
            res.dt,
            (0.19 / spacing, 0.28 / spacing),
            &HarminvOptions::default(),
        )
        .unwrap();
        println!("k_norm = {kn}:");
        for m in out.modes.iter().take(4) {
            println!(
                "   f*a = {:.6}  q = {:.3e}  amp = {:.3e}",
                m.frequency * spacing,
                m.q,
                m.amplitude
            );
        }
    }
}
