//! File formats: signal CSV, event-label CSV, and feature CSV.
//!
//! Signal files carry a two-line comment header with the sample rate and
//! units, then `t,ch1..chN` rows. Label and event files share one schema
//! so predictions can be diffed against ground truth directly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{Signal, Units};
use crate::types::{Abnormality, ContactType, EventLabel, Foot};

/// Serialize a signal to the CSV format:
/// `# sample_rate_hz=<f>`, `# units=<u>`, header row, one row per sample.
pub fn signal_to_csv(signal: &Signal) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sample_rate_hz={}", signal.sample_rate);
    let _ = writeln!(out, "# units={}", signal.units.as_str());
    out.push('t');
    for i in 0..signal.channel_count() {
        let _ = write!(out, ",ch{}", i + 1);
    }
    out.push('\n');
    for i in 0..signal.len() {
        let _ = write!(out, "{}", signal.time_at(i));
        for ch in &signal.channels {
            let _ = write!(out, ",{}", ch[i]);
        }
        out.push('\n');
    }
    out
}

pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    fs::write(path, signal_to_csv(signal))
        .map_err(|e| Error::file(path.display().to_string(), e.to_string()))
}

pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::file(path.display().to_string(), e.to_string()))?;
    parse_signal_csv(&text).map_err(|e| Error::file(path.display().to_string(), e.to_string()))
}

pub fn parse_signal_csv(text: &str) -> Result<Signal> {
    let mut sample_rate: Option<f64> = None;
    let mut units: Option<Units> = None;
    let mut start_time: Option<f64> = None;
    let mut columns: Option<usize> = None;
    let mut channels: Vec<Vec<f64>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("sample_rate_hz=") {
                sample_rate = Some(parse_f64(v, lineno)?);
            } else if let Some(v) = rest.strip_prefix("units=") {
                units = Some(Units::parse(v)?);
            }
            continue;
        }
        if line.starts_with('t') {
            // column header row
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::validation(format!(
                "line {}: expected `t,ch1..chN`, got `{line}`",
                lineno + 1
            )));
        }
        let ncols = fields.len() - 1;
        match columns {
            None => {
                columns = Some(ncols);
                channels = vec![Vec::new(); ncols];
            }
            Some(c) if c != ncols => {
                return Err(Error::validation(format!(
                    "line {}: inconsistent column count ({} vs {})",
                    lineno + 1,
                    ncols,
                    c
                )));
            }
            _ => {}
        }
        let t = parse_f64(fields[0], lineno)?;
        if start_time.is_none() {
            start_time = Some(t);
        }
        for (ch, field) in channels.iter_mut().zip(&fields[1..]) {
            ch.push(parse_f64(field, lineno)?);
        }
    }

    let sample_rate =
        sample_rate.ok_or_else(|| Error::validation("missing `# sample_rate_hz=` header"))?;
    let units = units.ok_or_else(|| Error::validation("missing `# units=` header"))?;
    if channels.is_empty() {
        return Err(Error::validation("signal file contains no samples"));
    }
    Signal::new(sample_rate, channels, units, start_time.unwrap_or(0.0))
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::validation(format!("line {}: `{}` is not a number", lineno + 1, s)))
}

pub const LABEL_HEADER: &str = "event_index,t_contact_s,t_off_s,contact_type,foot,abnormality_tags";

/// Serialize event labels (ground truth or predictions) to CSV.
pub fn labels_to_csv(labels: &[EventLabel]) -> String {
    let mut out = String::from(LABEL_HEADER);
    out.push('\n');
    for l in labels {
        let tags = l
            .abnormality_tags
            .iter()
            .map(|t| t.as_str())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            l.event_index,
            l.t_contact,
            l.t_off,
            l.contact_type.as_str(),
            l.foot.as_str(),
            tags
        );
    }
    out
}

pub fn write_labels_csv(path: &Path, labels: &[EventLabel]) -> Result<()> {
    fs::write(path, labels_to_csv(labels))
        .map_err(|e| Error::file(path.display().to_string(), e.to_string()))
}

pub fn read_labels_csv(path: &Path) -> Result<Vec<EventLabel>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::file(path.display().to_string(), e.to_string()))?;
    parse_labels_csv(&text).map_err(|e| Error::file(path.display().to_string(), e.to_string()))
}

pub fn parse_labels_csv(text: &str) -> Result<Vec<EventLabel>> {
    let mut labels = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("event_index") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::validation(format!(
                "line {}: expected 6 columns, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let event_index = fields[0].trim().parse::<usize>().map_err(|_| {
            Error::validation(format!("line {}: bad event_index `{}`", lineno + 1, fields[0]))
        })?;
        let t_contact = parse_f64(fields[1], lineno)?;
        let t_off = parse_f64(fields[2], lineno)?;
        if !(t_contact < t_off) {
            return Err(Error::validation(format!(
                "line {}: t_contact_s must be < t_off_s",
                lineno + 1
            )));
        }
        let contact_type = ContactType::parse(fields[3])?;
        let foot = Foot::parse(fields[4])?;
        let tags = fields[5]
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(Abnormality::parse)
            .collect::<Result<Vec<_>>>()?;
        labels.push(EventLabel {
            event_index,
            t_contact,
            t_off,
            contact_type,
            foot,
            abnormality_tags: tags,
        });
    }
    Ok(labels)
}

/// One row of the feature-export CSV (the plot-ready substitute for
/// embedding visualizations): `event_index,label,foot,f_<hz>...`.
pub fn features_to_csv(
    basis_frequencies: &[f64],
    rows: &[(usize, String, String, Vec<f64>)],
) -> String {
    let mut out = String::from("event_index,label,foot");
    for f in basis_frequencies {
        let _ = write!(out, ",f_{}", format_hz(*f));
    }
    out.push('\n');
    for (idx, label, foot, values) in rows {
        let _ = write!(out, "{},{},{}", idx, label, foot);
        for v in values {
            let _ = write!(out, ",{}", v);
        }
        out.push('\n');
    }
    out
}

fn format_hz(f: f64) -> String {
    if (f - f.round()).abs() < 1e-9 {
        format!("{}", f.round() as i64)
    } else {
        format!("{f:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_csv_round_trip_is_exact() {
        let sig = Signal::new(
            250.0,
            vec![vec![0.0, 1.5e-7, -2.25], vec![1.0, 2.0, 3.0]],
            Units::VelocityMps,
            0.5,
        )
        .unwrap();
        let text = signal_to_csv(&sig);
        let back = parse_signal_csv(&text).unwrap();
        assert_eq!(back.sample_rate, 250.0);
        assert_eq!(back.units, Units::VelocityMps);
        assert_eq!(back.channels, sig.channels);
        assert!((back.start_time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn labels_round_trip_preserves_tags() {
        let labels = vec![
            EventLabel {
                event_index: 0,
                t_contact: 0.5,
                t_off: 1.2,
                contact_type: ContactType::Heel,
                foot: Foot::Left,
                abnormality_tags: vec![],
            },
            EventLabel {
                event_index: 1,
                t_contact: 1.5,
                t_off: 2.4,
                contact_type: ContactType::Toe,
                foot: Foot::Right,
                abnormality_tags: vec![Abnormality::ToeWalking, Abnormality::Asymmetry],
            },
        ];
        let text = labels_to_csv(&labels);
        let back = parse_labels_csv(&text).unwrap();
        assert_eq!(back, labels);
    }

    #[test]
    fn unknown_contact_type_is_rejected() {
        let text = format!("{LABEL_HEADER}\n0,0.5,1.2,Knee,Left,\n");
        let err = parse_labels_csv(&text).unwrap_err();
        assert!(err.to_string().contains("contact_type"), "{err}");
    }
}
