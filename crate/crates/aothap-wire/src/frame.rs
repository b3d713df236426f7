//! Framed wire messages.
//!
//! Every message is `4-byte big-endian length | tag | version | body`,
//! where the length covers tag, version and body. Bodies are the codec
//! encodings of the phase objects; decoding validates every embedded
//! group element. Unknown tags and version mismatches are rejected.

use std::io::{Read, Write};

use thiserror::Error;

use aothap_core::bilinear::{Backend, BilinearGroup};
use aothap_core::codec::{self, CodecError, Reader};
use aothap_core::protocol::{
    IssueRequest, IssueResponse, ProtocolError, TransferRequest, TransferResponse,
};

pub const WIRE_VERSION: u8 = 1;
/// Upper bound on a frame's payload, to stop hostile length prefixes from
/// driving allocations.
pub const MAX_FRAME: usize = 64 << 20;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("framing error: {0}")]
    Framing(String),
    #[error("frame of {0} bytes exceeds the limit")]
    TooLarge(usize),
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("unsupported wire version {0}")]
    UnsupportedVersion(u8),
    #[error("element validation failed: {0}")]
    Codec(#[from] CodecError),
    #[error("protocol state error: {0}")]
    ProtocolState(String),
    #[error("peer rejected the request: {0}")]
    Rejected(RejectReason),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for WireError {
    fn from(e: std::io::Error) -> Self {
        WireError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MessageTag {
    IssueReq = 1,
    IssueResp = 2,
    IssueReject = 3,
    TransferReq = 4,
    TransferResp = 5,
    TransferReject = 6,
}

impl MessageTag {
    pub fn from_byte(b: u8) -> Result<Self, WireError> {
        Ok(match b {
            1 => MessageTag::IssueReq,
            2 => MessageTag::IssueResp,
            3 => MessageTag::IssueReject,
            4 => MessageTag::TransferReq,
            5 => MessageTag::TransferResp,
            6 => MessageTag::TransferReject,
            other => return Err(WireError::UnknownTag(other)),
        })
    }
}

/// Coarse rejection codes. Deliberately no finer detail: rejects must not
/// become a policy oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum RejectReason {
    ProofInvalid = 1,
    Quota = 2,
    OutOfOrder = 3,
    Denied = 4,
}

impl RejectReason {
    fn from_byte(b: u8) -> Result<Self, WireError> {
        Ok(match b {
            1 => RejectReason::ProofInvalid,
            2 => RejectReason::Quota,
            3 => RejectReason::OutOfOrder,
            4 => RejectReason::Denied,
            other => return Err(WireError::UnknownTag(other)),
        })
    }

    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::ProofInvalid => "proof-invalid",
            RejectReason::Quota => "quota",
            RejectReason::OutOfOrder => "out-of-order",
            RejectReason::Denied => "denied",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message<B: Backend> {
    IssueReq(IssueRequest<B>),
    IssueResp(IssueResponse<B>),
    IssueReject(RejectReason),
    TransferReq(TransferRequest<B>),
    TransferResp(TransferResponse<B>),
    TransferReject(RejectReason),
}

impl<B: Backend> Message<B> {
    pub fn tag(&self) -> MessageTag {
        match self {
            Message::IssueReq(_) => MessageTag::IssueReq,
            Message::IssueResp(_) => MessageTag::IssueResp,
            Message::IssueReject(_) => MessageTag::IssueReject,
            Message::TransferReq(_) => MessageTag::TransferReq,
            Message::TransferResp(_) => MessageTag::TransferResp,
            Message::TransferReject(_) => MessageTag::TransferReject,
        }
    }

    /// Number of group elements the message body carries.
    pub fn element_count(&self) -> usize {
        match self {
            Message::IssueReq(m) => m.randomized.len() + m.proof.element_count(),
            Message::IssueResp(m) => 1 + 3 * m.rows.len(),
            Message::TransferReq(m) => codec::transfer_request_element_count(m),
            Message::TransferResp(m) => codec::transfer_response_element_count(m),
            Message::IssueReject(_) | Message::TransferReject(_) => 0,
        }
    }
}

/// Encodes a message as one full frame, length prefix included.
pub fn encode_message<B: Backend>(msg: &Message<B>) -> Vec<u8> {
    let mut body = Vec::new();
    match msg {
        Message::IssueReq(m) => codec::put_issue_request(&mut body, m),
        Message::IssueResp(m) => codec::put_issue_response(&mut body, m),
        Message::TransferReq(m) => codec::put_transfer_request(&mut body, m),
        Message::TransferResp(m) => codec::put_transfer_response(&mut body, m),
        Message::IssueReject(r) | Message::TransferReject(r) => body.push(*r as u8),
    }
    let mut out = Vec::with_capacity(6 + body.len());
    let len = (body.len() + 2) as u32;
    out.extend_from_slice(&len.to_be_bytes());
    out.push(msg.tag() as u8);
    out.push(WIRE_VERSION);
    out.extend_from_slice(&body);
    out
}

/// Decodes exactly one frame. The group validates every element.
pub fn decode_message<B: Backend>(
    group: &BilinearGroup<B>,
    frame: &[u8],
) -> Result<Message<B>, WireError> {
    if frame.len() < 6 {
        return Err(WireError::Framing("frame shorter than header".into()));
    }
    let len = u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize;
    if len > MAX_FRAME {
        return Err(WireError::TooLarge(len));
    }
    if len + 4 != frame.len() {
        return Err(WireError::Framing(format!(
            "length prefix {} does not match payload {}",
            len,
            frame.len() - 4
        )));
    }
    let tag = MessageTag::from_byte(frame[4])?;
    let version = frame[5];
    if version != WIRE_VERSION {
        return Err(WireError::UnsupportedVersion(version));
    }
    let mut r = Reader::new(&frame[6..]);
    let msg = match tag {
        MessageTag::IssueReq => Message::IssueReq(codec::get_issue_request(&mut r, group)?),
        MessageTag::IssueResp => Message::IssueResp(codec::get_issue_response(&mut r, group)?),
        MessageTag::TransferReq => Message::TransferReq(codec::get_transfer_request(&mut r, group)?),
        MessageTag::TransferResp => {
            Message::TransferResp(codec::get_transfer_response(&mut r, group)?)
        }
        MessageTag::IssueReject => {
            let reason = RejectReason::from_byte(frame[6..].first().copied().ok_or_else(|| {
                WireError::Framing("empty reject body".into())
            })?)?;
            let _ = r.take(1);
            Message::IssueReject(reason)
        }
        MessageTag::TransferReject => {
            let reason = RejectReason::from_byte(frame[6..].first().copied().ok_or_else(|| {
                WireError::Framing("empty reject body".into())
            })?)?;
            let _ = r.take(1);
            Message::TransferReject(reason)
        }
    };
    r.finish().map_err(WireError::from)?;
    Ok(msg)
}

/// Reads one frame (length prefix included) from a stream.
pub fn read_frame(stream: &mut impl Read) -> Result<Vec<u8>, WireError> {
    let mut len_bytes = [0u8; 4];
    stream.read_exact(&mut len_bytes)?;
    let len = u32::from_be_bytes(len_bytes) as usize;
    if len > MAX_FRAME {
        return Err(WireError::TooLarge(len));
    }
    if len < 2 {
        return Err(WireError::Framing("frame shorter than header".into()));
    }
    let mut frame = Vec::with_capacity(4 + len);
    frame.extend_from_slice(&len_bytes);
    frame.resize(4 + len, 0);
    stream.read_exact(&mut frame[4..])?;
    Ok(frame)
}

pub fn write_frame(stream: &mut impl Write, frame: &[u8]) -> Result<(), WireError> {
    stream.write_all(frame)?;
    stream.flush()?;
    Ok(())
}
