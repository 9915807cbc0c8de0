//! Frame-sequence I/O: binary PGM (P5) images plus a small TOML manifest.
//!
//! Brightness maps linearly from [0, 1] to 8-bit gray; values outside the
//! range saturate. The PGM-sequence + manifest layout is both the output
//! format of the stimulus generator and the ingestion format for externally
//! produced videos.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameStream};
use crate::stimuli::StimulusSpec;

/// Sidecar metadata stored as `manifest.toml` next to the frames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamManifest {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub frame_rate_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stimulus: Option<StimulusSpec>,
}

/// Encode one frame as binary PGM.
pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.data.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

/// Decode a binary (P5) PGM with maxval 255.
pub fn decode_pgm(bytes: &[u8]) -> Result<Frame> {
    let bad = |detail: &str| Error::Parse { what: "pgm".into(), detail: detail.into() };
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        // skip whitespace and '#' comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token(bytes)? != "P5" {
        return Err(bad("not a binary PGM (want magic P5)"));
    }
    let parse = |s: String| s.parse::<usize>().map_err(|e| bad(&format!("bad header int: {e}")));
    let width = parse(token(bytes)?)?;
    let height = parse(token(bytes)?)?;
    let maxval = parse(token(bytes)?)?;
    if maxval != 255 {
        return Err(bad(&format!("unsupported maxval {maxval} (want 255)")));
    }
    pos += 1; // single whitespace byte after maxval
    let need = width * height;
    if bytes.len() < pos + need {
        return Err(bad("truncated pixel data"));
    }
    let data = bytes[pos..pos + need].iter().map(|&b| b as f64 / 255.0).collect();
    Frame::from_data(width, height, 0.0, data)
}

fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.pgm")
}

/// Write a stream as numbered PGM files plus `manifest.toml`.
pub fn write_stream(
    dir: &Path,
    stream: &FrameStream,
    stimulus: Option<&StimulusSpec>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let (width, height) = match stream.frames.first() {
        Some(f) => (f.width(), f.height()),
        None => (0, 0),
    };
    let manifest = StreamManifest {
        width,
        height,
        frames: stream.len(),
        frame_rate_hz: stream.frame_rate_hz,
        stimulus: stimulus.copied(),
    };
    let toml = toml::to_string_pretty(&manifest).map_err(|e| Error::Parse {
        what: "manifest".into(),
        detail: e.to_string(),
    })?;
    fs::write(dir.join("manifest.toml"), toml)?;
    let mut paths = Vec::with_capacity(stream.len());
    for (i, frame) in stream.frames.iter().enumerate() {
        let path = dir.join(frame_file_name(i));
        let mut w = BufWriter::new(fs::File::create(&path)?);
        w.write_all(&encode_pgm(frame))?;
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

/// Read a PGM-sequence directory written by [`write_stream`] (or produced
/// externally in the same layout).
pub fn read_stream(dir: &Path) -> Result<(FrameStream, StreamManifest)> {
    let manifest_path = dir.join("manifest.toml");
    let mut text = String::new();
    fs::File::open(&manifest_path)
        .map_err(|e| Error::Parse {
            what: format!("manifest {}", manifest_path.display()),
            detail: e.to_string(),
        })?
        .read_to_string(&mut text)?;
    let manifest: StreamManifest = toml::from_str(&text).map_err(|e| Error::Parse {
        what: format!("manifest {}", manifest_path.display()),
        detail: e.to_string(),
    })?;
    let mut stream = FrameStream::new(manifest.frame_rate_hz);
    let dt = stream.dt();
    for i in 0..manifest.frames {
        let bytes = fs::read(dir.join(frame_file_name(i)))?;
        let mut frame = decode_pgm(&bytes)?;
        if frame.width() != manifest.width || frame.height() != manifest.height {
            return Err(Error::ShapeMismatch(format!(
                "frame {i} is {}x{}, manifest says {}x{}",
                frame.width(),
                frame.height(),
                manifest.width,
                manifest.height
            )));
        }
        frame.t = i as f64 * dt;
        stream.frames.push(frame);
    }
    Ok((stream, manifest))
}
