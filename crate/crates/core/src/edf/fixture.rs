//! Synthetic EDF/EDF+ writer. This is the only writing path in the crate:
//! it exists to generate test fixtures and the demo corpus, and doubles as
//! the ground-truth oracle for the parser round-trip tests.

use super::tal::format_tal;
use super::{EdfError, SleepAnnotation, StageLabel, ANNOTATION_LABEL};

#[derive(Debug, Clone)]
pub struct FixtureSignal {
    pub label: String,
    pub transducer: String,
    pub physical_dim: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefiltering: String,
    pub samples_per_record: usize,
}

impl FixtureSignal {
    pub fn eeg(label: &str, samples_per_record: usize) -> Self {
        FixtureSignal {
            label: label.to_string(),
            transducer: "AgAgCl electrode".to_string(),
            physical_dim: "uV".to_string(),
            physical_min: -200.0,
            physical_max: 200.0,
            digital_min: -2048,
            digital_max: 2047,
            prefiltering: "HP:0.5Hz LP:45Hz".to_string(),
            samples_per_record,
        }
    }

    pub fn annotations(samples_per_record: usize) -> Self {
        FixtureSignal {
            label: ANNOTATION_LABEL.to_string(),
            transducer: String::new(),
            physical_dim: String::new(),
            physical_min: -1.0,
            physical_max: 1.0,
            digital_min: -32768,
            digital_max: 32767,
            prefiltering: String::new(),
            samples_per_record,
        }
    }

    /// Physical value -> clamped digital code (inverse of the read-side map).
    pub fn physical_to_digital(&self, physical: f64) -> i16 {
        let span_phys = self.physical_max - self.physical_min;
        let span_dig = (self.digital_max - self.digital_min) as f64;
        let digital = (physical - self.physical_min) * span_dig / span_phys + self.digital_min as f64;
        digital.round().clamp(self.digital_min as f64, self.digital_max as f64) as i16
    }
}

#[derive(Debug, Clone)]
pub struct FixtureRecording {
    pub version: String,
    pub patient_id: String,
    pub recording_id: String,
    pub start_date: String,
    pub start_time: String,
    /// Written verbatim; -1 exercises the unknown-record-count path.
    pub n_records_field: i64,
    pub record_duration_s: f64,
    pub signals: Vec<FixtureSignal>,
    /// Per signal: samples for all records, concatenated.
    pub data: Vec<Vec<i16>>,
}

fn fixed_ascii(text: &str, width: usize, field: &str) -> Vec<u8> {
    assert!(text.len() <= width, "{} {:?} exceeds {} bytes", field, text, width);
    assert!(text.bytes().all(|b| (32..=126).contains(&b)), "{} {:?} not printable ASCII", field, text);
    let mut out = text.as_bytes().to_vec();
    out.resize(width, b' ');
    out
}

pub(crate) fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e8 {
        format!("{}", v as i64)
    } else {
        format!("{}", v)
    }
}

impl FixtureRecording {
    pub fn new(record_duration_s: f64, signals: Vec<FixtureSignal>) -> Self {
        let n = signals.len();
        FixtureRecording {
            version: "0".to_string(),
            patient_id: "X X X X".to_string(),
            recording_id: "Startdate 01-JAN-2001 X X X".to_string(),
            start_date: "01.01.01".to_string(),
            start_time: "22.00.00".to_string(),
            n_records_field: 0,
            record_duration_s,
            signals,
            data: vec![Vec::new(); n],
        }
    }

    pub fn n_records(&self) -> usize {
        self.signals
            .iter()
            .zip(&self.data)
            .map(|(s, d)| if s.samples_per_record == 0 { 0 } else { d.len() / s.samples_per_record })
            .max()
            .unwrap_or(0)
    }

    /// Serialize to EDF bytes: fixed-width ASCII header, then records of
    /// interleaved per-signal i16 little-endian sample runs.
    pub fn encode(&self) -> Vec<u8> {
        let n_signals = self.signals.len();
        let header_bytes = 256 + 256 * n_signals;
        let n_records = self.n_records();
        let written_records = if self.n_records_field < 0 { self.n_records_field } else { n_records as i64 };

        let mut out = Vec::with_capacity(header_bytes);
        out.extend(fixed_ascii(&self.version, 8, "version"));
        out.extend(fixed_ascii(&self.patient_id, 80, "patient_id"));
        out.extend(fixed_ascii(&self.recording_id, 80, "recording_id"));
        out.extend(fixed_ascii(&self.start_date, 8, "start_date"));
        out.extend(fixed_ascii(&self.start_time, 8, "start_time"));
        out.extend(fixed_ascii(&header_bytes.to_string(), 8, "header_bytes"));
        out.extend(fixed_ascii("", 44, "reserved"));
        out.extend(fixed_ascii(&written_records.to_string(), 8, "n_records"));
        out.extend(fixed_ascii(&format_number(self.record_duration_s), 8, "record_duration"));
        out.extend(fixed_ascii(&n_signals.to_string(), 4, "n_signals"));

        for s in &self.signals {
            out.extend(fixed_ascii(&s.label, 16, "label"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.transducer, 80, "transducer"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.physical_dim, 8, "physical_dim"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&format_number(s.physical_min), 8, "physical_min"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&format_number(s.physical_max), 8, "physical_max"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.digital_min.to_string(), 8, "digital_min"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.digital_max.to_string(), 8, "digital_max"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.prefiltering, 80, "prefiltering"));
        }
        for s in &self.signals {
            out.extend(fixed_ascii(&s.samples_per_record.to_string(), 8, "samples_per_record"));
        }
        for _ in &self.signals {
            out.extend(fixed_ascii("", 32, "signal_reserved"));
        }
        debug_assert_eq!(out.len(), header_bytes);

        for record in 0..n_records {
            for (spec, samples) in self.signals.iter().zip(&self.data) {
                let spr = spec.samples_per_record;
                for i in 0..spr {
                    let idx = record * spr + i;
                    let v = samples.get(idx).copied().unwrap_or(0);
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }
}

/// Stage-specific test wave so fixture spectrograms are class-separable:
/// frequency and amplitude loosely follow each stage's dominant EEG band.
pub fn stage_waveform(stage: StageLabel) -> Waveform {
    match stage {
        StageLabel::Wake => Waveform { freq_hz: 20.0, amplitude_uv: 30.0 },
        StageLabel::N1 => Waveform { freq_hz: 6.0, amplitude_uv: 40.0 },
        StageLabel::N2 => Waveform { freq_hz: 13.0, amplitude_uv: 60.0 },
        StageLabel::N3 => Waveform { freq_hz: 2.0, amplitude_uv: 120.0 },
        StageLabel::Rem => Waveform { freq_hz: 9.0, amplitude_uv: 25.0 },
        StageLabel::Excluded => Waveform { freq_hz: 0.0, amplitude_uv: 0.0 },
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Waveform {
    pub freq_hz: f64,
    pub amplitude_uv: f64,
}

impl Waveform {
    pub fn sample(&self, t_s: f64) -> f64 {
        self.amplitude_uv * (2.0 * std::f64::consts::PI * self.freq_hz * t_s).sin()
    }
}

/// Build a PSG + hypnogram fixture pair for one synthetic night.
///
/// The PSG carries an "EEG Fpz-Cz" channel at `fs` Hz in 30-second records,
/// one record per stage epoch; the hypnogram is a standalone EDF+ file whose
/// annotation signal holds one run-length-encoded TAL per stage run.
pub fn synth_night(
    stages: &[StageLabel],
    fs: f64,
    noise: &mut impl FnMut() -> f64,
) -> Result<(FixtureRecording, FixtureRecording), EdfError> {
    let spr = (30.0 * fs).round() as usize;
    let eeg = FixtureSignal::eeg("EEG Fpz-Cz", spr);

    let mut samples = Vec::with_capacity(stages.len() * spr);
    for (epoch, &stage) in stages.iter().enumerate() {
        let wave = stage_waveform(stage);
        for i in 0..spr {
            let t = (epoch * spr + i) as f64 / fs;
            let physical = wave.sample(t) + noise();
            samples.push(eeg.physical_to_digital(physical));
        }
    }
    let mut psg = FixtureRecording::new(30.0, vec![eeg]);
    psg.data[0] = samples;

    // Run-length encode consecutive identical stages into one TAL each.
    let mut annotations: Vec<SleepAnnotation> = Vec::new();
    let mut run_start = 0usize;
    for i in 1..=stages.len() {
        if i == stages.len() || stages[i] != stages[run_start] {
            annotations.push(SleepAnnotation {
                onset_s: run_start as f64 * 30.0,
                duration_s: (i - run_start) as f64 * 30.0,
                raw_label: stages[run_start].raw_label().to_string(),
            });
            run_start = i;
        }
    }

    let hypnogram = annotation_file(&annotations)?;
    Ok((psg, hypnogram))
}

/// Standalone EDF+ hypnogram file: one annotation signal, one record holding
/// the timekeeping TAL followed by every stage TAL.
pub fn annotation_file(annotations: &[SleepAnnotation]) -> Result<FixtureRecording, EdfError> {
    // Timekeeping TAL first: onset of record 0, no duration, empty text.
    let mut payload: Vec<u8> = vec![b'+', b'0', 0x14, 0x14, 0x00];
    for ann in annotations {
        payload.extend_from_slice(&format_tal(ann.onset_s, ann.duration_s, &ann.raw_label));
    }
    if payload.len() % 2 == 1 {
        payload.push(0x00);
    }
    let spr = payload.len() / 2;
    let mut rec = FixtureRecording::new(30.0, vec![FixtureSignal::annotations(spr)]);
    rec.data[0] = payload
        .chunks_exact(2)
        .map(|p| i16::from_le_bytes([p[0], p[1]]))
        .collect();
    Ok(rec)
}
