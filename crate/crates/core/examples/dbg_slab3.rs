//! Compare raw probe series of k and k + 2pi/a patterned-slab runs, and
//! inspect the late-time decay directly.

use nwfd_core::fdtd::{run, AxisKind, Component, ProbeSpec, PulseKind, SimulationPlan, SourceSpec};
use nwfd_core::geometry::{
    build_periodic_layout, sample_structure, DeviceSpec, GridSpec, MaterialStack, StructureKind,
};
use num_complex::Complex64;
use std::sync::Arc;

fn series(kn: f64) -> (Vec<Complex64>, f64) {
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
    let f0 = 0.22 / spacing;
    let mut plan = SimulationPlan::new(eps);
    plan.courant = 0.45;
    plan.x = AxisKind::Bloch { k: kn * 2.0 * std::f64::consts::PI / spacing };
    plan.y = AxisKind::pml_faces(120.0);
    plan.z = AxisKind::Periodic;
    plan.sources.push(SourceSpec {
        position: [10.0, 30.0, 0.0],
        component: Component::Ey,
        center_freq: f0,
        bandwidth: 0.3 * f0,
        amplitude: 1.0,
        kind: PulseKind::Broadband,
    });
    plan.probes.push(ProbeSpec { position: [5.0, 40.0, 0.0], component: Component::Ey });
    plan.run_time = 150_000.0;
    let res = run(&plan).unwrap();
    (res.probes[0].series.clone(), res.dt)
}

fn main() {
    let (s1, dt) = series(0.3);
    let (s2, _) = series(1.3);
    let max_diff = s1
        .iter()
        .zip(s2.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let peak = s1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    println!("k vs k+2pi/a probe series: max diff {:.3e} of peak {:.3e}", max_diff / peak, peak);
    // Late-time envelope in decades.
    let n = s1.len();
    for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let i0 = (n as f64 * frac) as usize;
        let win = &s1[i0..(i0 + n / 20).min(n)];
        let amp = win.iter().map(|v| v.norm()).fold(0.0, f64::max);
        println!("t = {:9.0}: |Ey| ~ {:.3e}", i0 as f64 * dt, amp);
    }
}
