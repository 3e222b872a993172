//! Scratch probe: spectra of single steps at a node-free measurement point.

use footfall_core::dynamics::{simulate_response, BeamModel, TemplateConfig};
use footfall_core::features::{extract_features, power_spectrum, select_dominant_frequencies};
use footfall_core::signal::Signal;
use footfall_core::types::ContactType;

const DURATION_JITTER: [f64; 6] = [1.0, 0.93, 1.07, 0.97, 1.04, 0.9];

fn step_velocity(beam: &BeamModel, ty: ContactType, weight: f64, position: f64) -> Signal {
    let profile = TemplateConfig::default()
        .build(ty, weight, position, 1000.0)
        .unwrap();
    let seconds = profile.contact_duration + 0.8;
    simulate_response(beam, &profile, seconds, 1000.0)
        .unwrap()
        .differentiate()
}

fn step_segment(beam: &BeamModel, ty: ContactType, weight: f64, position: f64, ds: f64) -> Signal {
    let profile = TemplateConfig::default()
        .build_scaled(ty, weight, position, 1000.0, ds, 1.0)
        .unwrap();
    let seconds = profile.contact_duration + 0.8;
    let acc = simulate_response(beam, &profile, seconds, 1000.0)
        .unwrap()
        .differentiate()
        .differentiate();
    acc.slice(0, 0.0, profile.contact_duration).unwrap()
}

fn main() {
    let beam = BeamModel {
        sensor_positions: vec![0.9],
        ..BeamModel::default()
    };

    for ty in ContactType::ALL {
        let vel = step_velocity(&beam, ty, 700.0, 0.9);
        let spec = power_spectrum(&vel).unwrap();
        println!("== {} whole-signal spectrum, top 10 local maxima:", ty.as_str());
        let mut peaks: Vec<(f64, f64)> = (1..spec.amplitudes.len() - 1)
            .filter(|&i| {
                spec.amplitudes[i] > spec.amplitudes[i - 1]
                    && spec.amplitudes[i] > spec.amplitudes[i + 1]
                    && spec.frequencies[i] >= 8.0
            })
            .map(|i| (spec.frequencies[i], spec.amplitudes[i]))
            .collect();
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (f, a) in peaks.iter().take(10) {
            println!("   {f:7.2} Hz  {a:10.3e}");
        }
    }

    println!("\n== selection on [IC, FO] segments (k=4, duration-jittered):");
    let groups: Vec<(ContactType, Vec<Signal>)> = ContactType::ALL
        .iter()
        .map(|&ty| {
            let segs = (0..5)
                .map(|k| {
                    step_segment(&beam, ty, 550.0 + 70.0 * k as f64, 0.9, DURATION_JITTER[k])
                })
                .collect();
            (ty, segs)
        })
        .collect();
    let sel = select_dominant_frequencies(&groups, 4, 3.0).unwrap();
    println!("   basis: {:?}", sel.basis.frequencies);
    println!("   hb {}, underpopulated {}", sel.basis.half_bandwidth, sel.underpopulated);
    for (ty, segs) in &groups {
        let single =
            select_dominant_frequencies(&[(*ty, segs.clone())], 4, 3.0).unwrap();
        println!("   {} alone: {:?}", ty.as_str(), single.basis.frequencies);
    }

    println!("\n== cluster geometry on the selected basis (k=6):");
    let positions = [0.85, 0.9, 0.95, 0.88, 0.92, 0.9];
    let weights = [500.0, 580.0, 660.0, 740.0, 820.0, 900.0];
    let wide_groups: Vec<(ContactType, Vec<Signal>)> = ContactType::ALL
        .iter()
        .map(|&ty| {
            let segs = positions
                .iter()
                .zip(&weights)
                .zip(&DURATION_JITTER)
                .map(|((&x, &w), &d)| step_segment(&beam, ty, w, x, d))
                .collect();
            (ty, segs)
        })
        .collect();
    let basis = select_dominant_frequencies(&wide_groups, 6, 3.0).unwrap().basis;
    println!("   basis: {:?}", basis.frequencies);
    let clouds: Vec<Vec<Vec<f64>>> = wide_groups
        .iter()
        .map(|(_, segs)| {
            segs.iter()
                .map(|s| extract_features(s, &basis).unwrap().values)
                .collect()
        })
        .collect();
    let centroid = |cloud: &[Vec<f64>]| -> Vec<f64> {
        let d = cloud[0].len();
        let mut c = vec![0.0; d];
        for v in cloud {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        c.iter().map(|x| x / cloud.len() as f64).collect()
    };
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    let centroids: Vec<Vec<f64>> = clouds.iter().map(|c| centroid(c)).collect();
    for (k, c) in centroids.iter().enumerate() {
        let disp = clouds[k].iter().map(|v| dist(v, c)).sum::<f64>() / clouds[k].len() as f64;
        println!(
            "   type {k} centroid {:?} dispersion {disp:.4}",
            c.iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>()
        );
    }
    for i in 0..3 {
        for j in i + 1..3 {
            println!("   d({i},{j}) = {:.4}", dist(&centroids[i], &centroids[j]));
        }
    }
}
