//! Unpatterned slab: guided-mode frequency and Q vs the analytic
//! transcendental solution, varying lateral margin and boundary type.

use nwfd_core::analysis::{harmonic_inversion, HarminvOptions};
use nwfd_core::fdtd::{run, AxisKind, Component, Face, ProbeSpec, PulseKind, SimulationPlan, SourceSpec};
use nwfd_core::geometry::{
    sample_structure, DeviceSpec, GridSpec, HoleLayout, MaterialStack, StructureKind,
};
use nwfd_core::reference::{slab_mode_frequency, SlabPolarization};
use std::sync::Arc;

fn main() {
    let dx = 8.0_f64;
    let spacing = 160.0_f64;
    let spec = DeviceSpec::default();
    let k_norm = 0.45_f64;
    let beta = k_norm * 2.0 * std::f64::consts::PI / spacing;
    let f_exact = slab_mode_frequency(2.4, 1.0, spec.width, beta, SlabPolarization::Tm).unwrap();
    println!("analytic f*a = {:.6}", f_exact * spacing);

    for (margin, pml) in [(260.0, 120.0), (600.0, 160.0), (1000.0, 240.0), (600.0, 0.0)] {
        let half = spec.width / 2.0 + margin + pml;
        let ny = (2.0 * half / dx).round() as usize;
        let nx = (spacing / dx).round() as usize;
        let grid = GridSpec {
            origin: [0.0, -(ny as f64) * dx / 2.0, 0.0],
            dims: [nx, ny, 1],
            dx,
        };
        let layout = HoleLayout { holes: vec![], span: (0.0, spacing) };
        let kind = StructureKind::VerticalSlab { layout, width: spec.width };
        let eps = Arc::new(
            sample_structure(&kind, &MaterialStack::default(), grid, spacing / dx, true, Some(spacing))
                .unwrap()
                .eps,
        );
        let mut plan = SimulationPlan::new(eps);
        plan.courant = 0.45;
        plan.x = AxisKind::Bloch { k: beta };
        plan.y = if pml > 0.0 {
            AxisKind::pml_faces(pml)
        } else {
            AxisKind::Faces { lo: Face::Pec, hi: Face::Pec }
        };
        plan.z = AxisKind::Periodic;
        plan.sources.push(SourceSpec {
            position: [37.0, 11.0, 0.0],
            component: Component::Ey,
            center_freq: f_exact,
            bandwidth: 0.25 * f_exact,
            amplitude: 1.0,
            kind: PulseKind::Broadband,
        });
        plan.probes.push(ProbeSpec { position: [61.0, 24.0, 0.0], component: Component::Ey });
        plan.run_time = 300.0 / f_exact;
        let res = run(&plan).unwrap();
        let start = (res.source_off_time / res.dt).ceil() as usize;
        let out = harmonic_inversion(
            &res.probes[0].series[start..],
            res.dt,
            (0.8 * f_exact, 1.2 * f_exact),
            &HarminvOptions::default(),
        )
        .unwrap();
        println!("margin {margin} pml {pml}:");
        for m in out.modes.iter().take(2) {
            println!(
                "   f*a = {:.6} (err {:+.3e})  q = {:.3e}  amp = {:.3e}",
                m.frequency * spacing,
                m.frequency / f_exact - 1.0,
                m.q,
                m.amplitude
            );
        }
    }
}
