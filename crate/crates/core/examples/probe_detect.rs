//! Scratch probe: high-band aggregate contrast, stance vs between steps.

use footfall_core::dynamics::{synth_gait_dataset_with, BeamModel, GaitSequenceSpec, WalkLayout};
use footfall_core::pipeline::cwt::cwt;
use footfall_core::types::ContactType;

fn main() {
    let beam = BeamModel::default();
    let layout = WalkLayout::default();
    for (ty, dur) in [
        (ContactType::Heel, 0.7),
        (ContactType::Midfoot, 0.9),
        (ContactType::Toe, 0.5),
    ] {
        let spec = GaitSequenceSpec {
            step_count: 5,
            left_contact_type: ty,
            right_contact_type: ty,
            left_contact_duration: dur,
            right_contact_duration: dur,
            noise_snr_db: None,
            ..GaitSequenceSpec::default()
        };
        let (sig, labels) = synth_gait_dataset_with(&beam, &spec, &layout).unwrap();
        let scs = cwt(&sig, 5.0, 250.0, 12).unwrap();
        let s = &scs[0];
        let high = s.band_aggregate(80.0, f64::INFINITY);
        let idx = |t: f64| s.index_at(t);
        let min_in = |t0: f64, t1: f64| -> f64 {
            high[idx(t0)..=idx(t1)].iter().cloned().fold(f64::INFINITY, f64::min)
        };
        let max_in = |t0: f64, t1: f64| -> f64 {
            high[idx(t0)..=idx(t1)].iter().cloned().fold(0.0, f64::max)
        };
        let l0 = &labels[0];
        let l1 = &labels[1];
        println!("== {:?} (contact {:.2}..{:.2}, next {:.2})", ty, l0.t_contact, l0.t_off, l1.t_contact);
        println!("   high gmax                 {:.3e}", max_in(0.0, 7.5));
        println!("   stance1 min (IC+0.1..FO)  {:.3e}", min_in(l0.t_contact + 0.1, l0.t_off));
        println!("   stance1 median-ish mid    {:.3e}", max_in((l0.t_contact + l0.t_off) / 2.0 - 0.05, (l0.t_contact + l0.t_off) / 2.0 + 0.05));
        println!("   gap max (FO+0.15..next-0.05) {:.3e}", max_in(l0.t_off + 0.15, l1.t_contact - 0.05));
        println!("   pre-walk floor            {:.3e}", max_in(0.0, 0.6));
    }
}
