//! Wire protocol, sessions and the command-line interface.
//!
//! Messages are length-framed, tagged encodings of the protocol phase
//! objects. A sender session answers issue and transfer requests subject
//! to a per-session quota and an approval hook; receiver sessions drive
//! the round trips over a transport (in-process loopback or TCP).

pub mod cli;
pub mod frame;
pub mod session;
pub mod transport;

pub use frame::{decode_message, encode_message, Message, MessageTag, RejectReason, WireError};
pub use session::{ApprovalHook, ApproveAll, FixedApproval, ReceiverSession, SenderSession};
pub use transport::{serve, Loopback, TcpTransport, Transport, TranscriptEntry};
