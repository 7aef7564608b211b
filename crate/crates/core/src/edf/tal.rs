//! Time-stamped Annotation Lists (TALs), the EDF+ container for hypnogram
//! stage marks. Delimiters: 0x15 introduces the duration, 0x14 terminates
//! each text, 0x00 terminates the TAL.

use super::EdfError;

const DURATION_SEP: u8 = 0x15;
const TEXT_END: u8 = 0x14;
const TAL_END: u8 = 0x00;

#[derive(Debug, Clone, PartialEq)]
pub struct SleepAnnotation {
    /// Seconds from recording start.
    pub onset_s: f64,
    /// Zero when the TAL carried no duration field.
    pub duration_s: f64,
    /// Verbatim annotation text, e.g. "Sleep stage 1".
    pub raw_label: String,
}

fn parse_seconds(text: &str, offset: usize, what: &str) -> Result<f64, EdfError> {
    text.parse::<f64>().map_err(|_| EdfError::MalformedTal {
        offset,
        reason: format!("non-numeric {}: {:?}", what, text),
    })
}

/// Parse a raw TAL byte stream (the concatenated annotation-signal payload).
/// Zero padding between TALs is skipped; timekeeping TALs (empty text) are
/// dropped; every other text becomes one annotation.
pub fn parse_tal_stream(stream: &[u8]) -> Result<Vec<SleepAnnotation>, EdfError> {
    let mut out = Vec::new();
    let mut pos = 0usize;

    while pos < stream.len() {
        if stream[pos] == TAL_END {
            pos += 1;
            continue;
        }
        let tal_start = pos;

        // Onset and optional duration run until the first 0x14.
        let header_end = stream[pos..]
            .iter()
            .position(|&b| b == TEXT_END)
            .map(|i| pos + i)
            .ok_or_else(|| EdfError::MalformedTal {
                offset: tal_start,
                reason: "no 0x14 after onset".into(),
            })?;
        let header = &stream[pos..header_end];
        if header.first().map_or(true, |&b| b != b'+' && b != b'-') {
            return Err(EdfError::MalformedTal {
                offset: tal_start,
                reason: "onset must start with '+' or '-'".into(),
            });
        }
        let header_text = std::str::from_utf8(header).map_err(|_| EdfError::MalformedTal {
            offset: tal_start,
            reason: "non-UTF-8 onset/duration".into(),
        })?;
        let (onset_text, duration_text) = match header_text.split_once(DURATION_SEP as char) {
            Some((o, d)) => (o, Some(d)),
            None => (header_text, None),
        };
        let onset_s = parse_seconds(onset_text, tal_start, "onset")?;
        let duration_s = match duration_text {
            Some(d) => parse_seconds(d, tal_start, "duration")?,
            None => 0.0,
        };

        // Texts: each terminated by 0x14; the TAL closes with 0x00.
        pos = header_end + 1;
        loop {
            if pos >= stream.len() {
                return Err(EdfError::MalformedTal {
                    offset: tal_start,
                    reason: "stream ends before TAL terminator".into(),
                });
            }
            if stream[pos] == TAL_END {
                pos += 1;
                break;
            }
            let text_end = stream[pos..]
                .iter()
                .position(|&b| b == TEXT_END)
                .map(|i| pos + i)
                .ok_or_else(|| EdfError::MalformedTal {
                    offset: tal_start,
                    reason: "annotation text missing 0x14 terminator".into(),
                })?;
            let text = std::str::from_utf8(&stream[pos..text_end]).map_err(|_| {
                EdfError::MalformedTal { offset: tal_start, reason: "non-UTF-8 annotation text".into() }
            })?;
            if !text.is_empty() {
                out.push(SleepAnnotation {
                    onset_s,
                    duration_s,
                    raw_label: text.to_string(),
                });
            }
            pos = text_end + 1;
        }
    }

    Ok(out)
}

fn format_seconds(v: f64) -> String {
    if v == v.trunc() && v.abs() < 9e15 {
        format!("{}", v as i64)
    } else {
        format!("{}", v)
    }
}

/// Canonical TAL bytes for one annotation: `±onset 0x15 duration 0x14 text 0x14 0x00`.
pub fn format_tal(onset_s: f64, duration_s: f64, text: &str) -> Vec<u8> {
    let sign = if onset_s < 0.0 { "" } else { "+" };
    let mut bytes = format!("{}{}", sign, format_seconds(onset_s)).into_bytes();
    bytes.push(DURATION_SEP);
    bytes.extend_from_slice(format_seconds(duration_s).as_bytes());
    bytes.push(TEXT_END);
    bytes.extend_from_slice(text.as_bytes());
    bytes.push(TEXT_END);
    bytes.push(TAL_END);
    bytes
}

/// Serialize annotations back to a canonical TAL stream, one TAL each.
pub fn serialize_annotations(annotations: &[SleepAnnotation]) -> Vec<u8> {
    let mut out = Vec::new();
    for ann in annotations {
        out.extend_from_slice(&format_tal(ann.onset_s, ann.duration_s, &ann.raw_label));
    }
    out
}
