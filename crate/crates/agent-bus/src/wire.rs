//! Optional socket wire form: a 4-byte big-endian length prefix followed by
//! the envelope as UTF-8 JSON, field names exactly as in [`Envelope`].
//! The in-process broker never touches this; it exists so a future socket
//! transport speaks the same protocol the logs already record.

use serde_json;
use thiserror::Error;

use crate::envelope::Envelope;

/// Maximum accepted frame body, a guard against corrupt length prefixes.
pub const MAX_FRAME_LEN: u32 = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("frame too short: {0} bytes")]
    Truncated(usize),

    #[error("frame length {0} exceeds limit")]
    Oversized(u32),

    #[error("frame body is not a valid envelope: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// Encodes one envelope as a length-prefixed frame.
pub fn encode(env: &Envelope) -> Vec<u8> {
    let body = serde_json::to_vec(env).expect("envelopes always serialize");
    let mut frame = Vec::with_capacity(4 + body.len());
    frame.extend_from_slice(&(body.len() as u32).to_be_bytes());
    frame.extend_from_slice(&body);
    frame
}

/// Decodes one frame, returning the envelope and the bytes consumed.
pub fn decode(buf: &[u8]) -> Result<(Envelope, usize), WireError> {
    if buf.len() < 4 {
        return Err(WireError::Truncated(buf.len()));
    }
    let len = u32::from_be_bytes([buf[0], buf[1], buf[2], buf[3]]);
    if len > MAX_FRAME_LEN {
        return Err(WireError::Oversized(len));
    }
    let end = 4 + len as usize;
    if buf.len() < end {
        return Err(WireError::Truncated(buf.len()));
    }
    let env = serde_json::from_slice(&buf[4..end])?;
    Ok((env, end))
}
