//! Quick 1D engine checks: propagation speed, PML absorption.

use nwfd_core::fdtd::{
    run, AxisKind, Component, Face, ProbeSpec, PulseKind, SimulationPlan, SourceSpec,
};
use nwfd_core::geometry::{sample_structure, GridSpec, Material, MaterialStack, StructureKind};
use std::sync::Arc;

fn vacuum_1d(nz: usize, dx: f64) -> Arc<nwfd_core::geometry::PermittivityGrid> {
    let grid = GridSpec { origin: [0.0, 0.0, 0.0], dims: [1, 1, nz], dx };
    let s = sample_structure(
        &StructureKind::Uniform(Material::Air),
        &MaterialStack::default(),
        grid,
        160.0 / dx,
        false,
        None,
    )
    .unwrap();
    Arc::new(s.eps)
}

fn main() {
    let dx = 5.0;
    let nz = 1200;
    let eps = vacuum_1d(nz, dx);
    let mut plan = SimulationPlan::new(eps);
    plan.courant = 0.5;
    plan.x = AxisKind::Periodic;
    plan.y = AxisKind::Periodic;
    plan.z = AxisKind::Faces {
        lo: Face::Pml { thickness: 100.0 },
        hi: Face::Pml { thickness: 100.0 },
    };
    let f0 = 1.0 / 640.0;
    plan.sources.push(SourceSpec {
        position: [0.0, 0.0, 1500.0],
        component: Component::Ex,
        center_freq: f0,
        bandwidth: 0.3 * f0,
        amplitude: 1.0,
        kind: PulseKind::Broadband,
    });
    let (za, zb) = (2500.0, 4500.0);
    plan.probes.push(ProbeSpec { position: [0.0, 0.0, za], component: Component::Ex });
    plan.probes.push(ProbeSpec { position: [0.0, 0.0, zb], component: Component::Ex });
    plan.run_time = 8000.0;
    let res = run(&plan).unwrap();
    // Peak arrival times.
    let peak_time = |series: &[num_complex::Complex64]| {
        let (mut ti, mut tv) = (0usize, 0.0f64);
        for (i, v) in series.iter().enumerate() {
            if v.norm() > tv {
                tv = v.norm();
                ti = i;
            }
        }
        (ti as f64 * res.dt, tv)
    };
    let (t1, v1) = peak_time(&res.probes[0].series);
    let (t2, v2) = peak_time(&res.probes[1].series);
    let speed = (zb - za) / (t2 - t1);
    println!("peak1 t={t1:.1} amp={v1:.4e}; peak2 t={t2:.1} amp={v2:.4e}");
    println!("measured speed = {speed:.5} c (want within 1%)");

    // Late-time energy at probe (after pulse passed + PML absorbed): ratio of
    // max |field| after t=6500 to the peak.
    let late_max = res.probes[0]
        .series
        .iter()
        .enumerate()
        .filter(|(i, _)| *i as f64 * res.dt > 6500.0)
        .map(|(_, v)| v.norm())
        .fold(0.0f64, f64::max);
    println!("late residual at probe 1: {:.3e} of peak", late_max / v1);
}
