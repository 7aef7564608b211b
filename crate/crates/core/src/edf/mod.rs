//! EDF/EDF+ recording parser: fixed-width ASCII header, 16-bit little-endian
//! sample records, and the time-stamped annotation lists (TALs) that carry
//! hypnogram stage labels.
//!
//! The layout follows the published EDF container format: a 256-byte global
//! header, then 256 bytes of per-signal header fields distributed
//! field-by-field (all labels, then all transducers, ...), then fixed-size
//! data records in which each signal contributes `samples_per_record`
//! consecutive i16 samples.

mod fixture;
mod stage;
mod tal;

pub use fixture::{FixtureRecording, FixtureSignal, Waveform};
pub use stage::{remap_stage, StageLabel};
pub use tal::{format_tal, parse_tal_stream, serialize_annotations, SleepAnnotation};

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

pub const GLOBAL_HEADER_LEN: usize = 256;
pub const PER_SIGNAL_HEADER_LEN: usize = 256;
/// Label of the EDF+ annotation signal.
pub const ANNOTATION_LABEL: &str = "EDF Annotations";

#[derive(Debug, Error)]
pub enum EdfError {
    #[error("truncated header: need {expected} bytes, have {actual}")]
    TruncatedHeader { expected: usize, actual: usize },
    #[error("malformed {field} field: {text:?}")]
    MalformedField { field: &'static str, text: String },
    #[error("header invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unknown channel {0:?}")]
    UnknownChannel(String),
    #[error("truncated data: record {record} ends past end of file")]
    TruncatedData { record: usize },
    #[error("malformed TAL at byte {offset}: {reason}")]
    MalformedTal { offset: usize, reason: String },
    #[error("annotation onsets are not monotonic: {prev} followed by {next}")]
    NonMonotonicOnsets { prev: f64, next: f64 },
    #[error("no annotation signal in file and no TAL stream recognized")]
    NoAnnotations,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-signal header block.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
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

impl SignalSpec {
    pub fn is_annotation(&self) -> bool {
        self.label == ANNOTATION_LABEL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdfHeader {
    pub version: String,
    pub patient_id: String,
    pub recording_id: String,
    pub start_date: String,
    pub start_time: String,
    pub header_bytes: usize,
    pub reserved: String,
    /// -1 when the writer did not know the record count up front.
    pub n_records: i64,
    pub record_duration_s: f64,
    pub signals: Vec<SignalSpec>,
}

impl EdfHeader {
    pub fn n_signals(&self) -> usize {
        self.signals.len()
    }

    /// Bytes occupied by one data record (2 bytes per sample, all signals).
    pub fn record_byte_len(&self) -> usize {
        self.signals.iter().map(|s| 2 * s.samples_per_record).sum()
    }

    pub fn signal_index(&self, label: &str) -> Option<usize> {
        let want = label.trim();
        self.signals.iter().position(|s| s.label == want)
    }

    /// Sample rate of one signal in Hz.
    pub fn sample_rate(&self, signal: usize) -> f64 {
        self.signals[signal].samples_per_record as f64 / self.record_duration_s
    }

    /// Record count, resolving n_records == -1 from the file length.
    pub fn resolved_n_records(&self, file_len: usize) -> usize {
        if self.n_records >= 0 {
            self.n_records as usize
        } else {
            let record_len = self.record_byte_len();
            if record_len == 0 {
                0
            } else {
                file_len.saturating_sub(self.header_bytes) / record_len
            }
        }
    }
}

/// One channel converted to physical units.
#[derive(Debug, Clone)]
pub struct ChannelData {
    pub label: String,
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    /// Digital samples outside [digital_min, digital_max] that were clamped.
    pub clamped: usize,
}

/// A fully parsed recording: header plus the channels the caller asked for.
#[derive(Debug, Clone)]
pub struct EdfRecording {
    pub header: EdfHeader,
    pub channels: BTreeMap<String, ChannelData>,
}

fn ascii_field<'a>(bytes: &'a [u8], offset: &mut usize, len: usize) -> &'a [u8] {
    let field = &bytes[*offset..*offset + len];
    *offset += len;
    field
}

fn trim_ascii(field: &[u8]) -> Result<String, EdfError> {
    if field.iter().any(|&b| !(32..=126).contains(&b)) {
        return Err(EdfError::MalformedField {
            field: "ascii",
            text: String::from_utf8_lossy(field).into_owned(),
        });
    }
    Ok(std::str::from_utf8(field).unwrap().trim().to_string())
}

fn text_field(field: &[u8], name: &'static str) -> Result<String, EdfError> {
    trim_ascii(field).map_err(|_| EdfError::MalformedField {
        field: name,
        text: String::from_utf8_lossy(field).into_owned(),
    })
}

fn int_field(field: &[u8], name: &'static str) -> Result<i64, EdfError> {
    let text = text_field(field, name)?;
    text.parse::<i64>().map_err(|_| EdfError::MalformedField { field: name, text })
}

fn float_field(field: &[u8], name: &'static str) -> Result<f64, EdfError> {
    let text = text_field(field, name)?;
    text.parse::<f64>().map_err(|_| EdfError::MalformedField { field: name, text })
}

/// Parse the fixed-width ASCII header (global block plus all signal blocks).
pub fn parse_edf_header(bytes: &[u8]) -> Result<EdfHeader, EdfError> {
    if bytes.len() < GLOBAL_HEADER_LEN {
        return Err(EdfError::TruncatedHeader { expected: GLOBAL_HEADER_LEN, actual: bytes.len() });
    }

    let mut off = 0;
    let version = text_field(ascii_field(bytes, &mut off, 8), "version")?;
    let patient_id = text_field(ascii_field(bytes, &mut off, 80), "patient_id")?;
    let recording_id = text_field(ascii_field(bytes, &mut off, 80), "recording_id")?;
    let start_date = text_field(ascii_field(bytes, &mut off, 8), "start_date")?;
    let start_time = text_field(ascii_field(bytes, &mut off, 8), "start_time")?;
    let header_bytes = int_field(ascii_field(bytes, &mut off, 8), "header_bytes")?;
    let reserved = text_field(ascii_field(bytes, &mut off, 44), "reserved")?;
    let n_records = int_field(ascii_field(bytes, &mut off, 8), "n_records")?;
    let record_duration_s = float_field(ascii_field(bytes, &mut off, 8), "record_duration")?;
    let n_signals = int_field(ascii_field(bytes, &mut off, 4), "n_signals")?;

    if n_signals < 0 {
        return Err(EdfError::MalformedField { field: "n_signals", text: n_signals.to_string() });
    }
    let n_signals = n_signals as usize;

    let expected = GLOBAL_HEADER_LEN + PER_SIGNAL_HEADER_LEN * n_signals;
    if header_bytes as usize != expected {
        return Err(EdfError::InvariantViolation(format!(
            "header_bytes {} != 256 + 256 x {} signals",
            header_bytes, n_signals
        )));
    }
    if bytes.len() < expected {
        return Err(EdfError::TruncatedHeader { expected, actual: bytes.len() });
    }

    // Signal fields are stored field-by-field across all signals.
    let mut labels = Vec::with_capacity(n_signals);
    let mut transducers = Vec::with_capacity(n_signals);
    let mut dims = Vec::with_capacity(n_signals);
    let mut phys_min = Vec::with_capacity(n_signals);
    let mut phys_max = Vec::with_capacity(n_signals);
    let mut dig_min = Vec::with_capacity(n_signals);
    let mut dig_max = Vec::with_capacity(n_signals);
    let mut prefilter = Vec::with_capacity(n_signals);
    let mut spr = Vec::with_capacity(n_signals);

    for _ in 0..n_signals {
        labels.push(text_field(ascii_field(bytes, &mut off, 16), "label")?);
    }
    for _ in 0..n_signals {
        transducers.push(text_field(ascii_field(bytes, &mut off, 80), "transducer")?);
    }
    for _ in 0..n_signals {
        dims.push(text_field(ascii_field(bytes, &mut off, 8), "physical_dim")?);
    }
    for _ in 0..n_signals {
        phys_min.push(float_field(ascii_field(bytes, &mut off, 8), "physical_min")?);
    }
    for _ in 0..n_signals {
        phys_max.push(float_field(ascii_field(bytes, &mut off, 8), "physical_max")?);
    }
    for _ in 0..n_signals {
        dig_min.push(int_field(ascii_field(bytes, &mut off, 8), "digital_min")? as i32);
    }
    for _ in 0..n_signals {
        dig_max.push(int_field(ascii_field(bytes, &mut off, 8), "digital_max")? as i32);
    }
    for _ in 0..n_signals {
        prefilter.push(text_field(ascii_field(bytes, &mut off, 80), "prefiltering")?);
    }
    for _ in 0..n_signals {
        spr.push(int_field(ascii_field(bytes, &mut off, 8), "samples_per_record")?);
    }
    // Remaining 32 bytes per signal are reserved.

    let mut signals = Vec::with_capacity(n_signals);
    for i in 0..n_signals {
        if dig_min[i] >= dig_max[i] {
            return Err(EdfError::InvariantViolation(format!(
                "signal {:?}: digital_min {} >= digital_max {}",
                labels[i], dig_min[i], dig_max[i]
            )));
        }
        if phys_min[i] == phys_max[i] {
            return Err(EdfError::InvariantViolation(format!(
                "signal {:?}: physical_min == physical_max == {}",
                labels[i], phys_min[i]
            )));
        }
        if spr[i] <= 0 {
            return Err(EdfError::InvariantViolation(format!(
                "signal {:?}: samples_per_record {} must be positive",
                labels[i], spr[i]
            )));
        }
        signals.push(SignalSpec {
            label: labels[i].clone(),
            transducer: transducers[i].clone(),
            physical_dim: dims[i].clone(),
            physical_min: phys_min[i],
            physical_max: phys_max[i],
            digital_min: dig_min[i],
            digital_max: dig_max[i],
            prefiltering: prefilter[i].clone(),
            samples_per_record: spr[i] as usize,
        });
    }

    // Annotation-only EDF+ files may legally carry a zero record duration.
    let all_annotations = signals.iter().all(|s| s.is_annotation());
    if record_duration_s <= 0.0 && !(all_annotations && record_duration_s == 0.0) {
        return Err(EdfError::InvariantViolation(format!(
            "record duration {} must be positive",
            record_duration_s
        )));
    }

    Ok(EdfHeader {
        version,
        patient_id,
        recording_id,
        start_date,
        start_time,
        header_bytes: expected,
        reserved,
        n_records,
        record_duration_s,
        signals,
    })
}

/// Linear digital-to-physical map; exact at both digital endpoints.
#[inline]
pub fn digital_to_physical(spec: &SignalSpec, digital: i32) -> f64 {
    let span_phys = spec.physical_max - spec.physical_min;
    let span_dig = (spec.digital_max - spec.digital_min) as f64;
    (digital - spec.digital_min) as f64 * span_phys / span_dig + spec.physical_min
}

/// Extract one channel from a whole-file byte buffer, de-interleaving the
/// record layout and converting to physical units. Out-of-range digital
/// samples are clamped and counted.
pub fn read_channel(file_bytes: &[u8], header: &EdfHeader, channel_label: &str) -> Result<ChannelData, EdfError> {
    let idx = header
        .signal_index(channel_label)
        .ok_or_else(|| EdfError::UnknownChannel(channel_label.trim().to_string()))?;
    let spec = &header.signals[idx];

    let n_records = header.resolved_n_records(file_bytes.len());
    let record_len = header.record_byte_len();
    let signal_offset: usize = header.signals[..idx].iter().map(|s| 2 * s.samples_per_record).sum();

    let mut samples = Vec::with_capacity(n_records * spec.samples_per_record);
    let mut clamped = 0usize;
    for record in 0..n_records {
        let start = header.header_bytes + record * record_len + signal_offset;
        let end = start + 2 * spec.samples_per_record;
        if end > file_bytes.len() {
            return Err(EdfError::TruncatedData { record });
        }
        for pair in file_bytes[start..end].chunks_exact(2) {
            let raw = i16::from_le_bytes([pair[0], pair[1]]) as i32;
            let digital = raw.clamp(spec.digital_min, spec.digital_max);
            if digital != raw {
                clamped += 1;
            }
            samples.push(digital_to_physical(spec, digital));
        }
    }

    Ok(ChannelData {
        label: spec.label.clone(),
        samples,
        sample_rate: header.sample_rate(idx),
        clamped,
    })
}

/// Extract the raw byte stream of the EDF+ annotation signal across records.
fn annotation_stream(file_bytes: &[u8], header: &EdfHeader) -> Result<Vec<u8>, EdfError> {
    let idx = header
        .signals
        .iter()
        .position(|s| s.is_annotation())
        .ok_or(EdfError::NoAnnotations)?;
    let spec = &header.signals[idx];

    let n_records = header.resolved_n_records(file_bytes.len());
    let record_len = header.record_byte_len();
    let signal_offset: usize = header.signals[..idx].iter().map(|s| 2 * s.samples_per_record).sum();

    let mut stream = Vec::with_capacity(n_records * 2 * spec.samples_per_record);
    for record in 0..n_records {
        let start = header.header_bytes + record * record_len + signal_offset;
        let end = start + 2 * spec.samples_per_record;
        if end > file_bytes.len() {
            return Err(EdfError::TruncatedData { record });
        }
        stream.extend_from_slice(&file_bytes[start..end]);
    }
    Ok(stream)
}

/// Parse the hypnogram annotations carried by an EDF+ file (a standalone
/// hypnogram companion or a recording with an embedded annotation signal).
pub fn parse_annotations(file_bytes: &[u8]) -> Result<Vec<SleepAnnotation>, EdfError> {
    let header = parse_edf_header(file_bytes)?;
    let stream = annotation_stream(file_bytes, &header)?;
    let annotations = tal::parse_tal_stream(&stream)?;

    let mut prev: Option<f64> = None;
    for ann in &annotations {
        if let Some(p) = prev {
            if ann.onset_s < p {
                return Err(EdfError::NonMonotonicOnsets { prev: p, next: ann.onset_s });
            }
        }
        prev = Some(ann.onset_s);
    }
    Ok(annotations)
}

/// Convenience wrapper: parse header and the requested channels from a file.
pub fn read_recording(path: &Path, channels: &[&str]) -> Result<EdfRecording, EdfError> {
    let bytes = std::fs::read(path)?;
    let header = parse_edf_header(&bytes)?;
    let mut out = BTreeMap::new();
    for label in channels {
        let data = read_channel(&bytes, &header, label)?;
        out.insert(data.label.clone(), data);
    }
    Ok(EdfRecording { header, channels: out })
}

#[cfg(test)]
mod tests;
