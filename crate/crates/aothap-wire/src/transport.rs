//! Transports: in-process loopback and TCP sockets.
//!
//! Both record a transcript of every frame in both directions; with
//! identical seeds the two transports produce identical transcripts.

use std::collections::VecDeque;
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;

use aothap_core::bilinear::Backend;
use aothap_core::protocol::{Crs, SenderKeys};

use crate::frame::{read_frame, write_frame, WireError};
use crate::session::SenderSession;

/// One recorded frame. `to_sender` marks the receiver-to-sender
/// direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub to_sender: bool,
    pub frame: Vec<u8>,
}

pub trait Transport {
    fn send(&mut self, frame: &[u8]) -> Result<(), WireError>;
    fn recv(&mut self) -> Result<Vec<u8>, WireError>;
    fn transcript(&self) -> &[TranscriptEntry];
}

/// Drives a sender session in-process.
pub struct Loopback<B: Backend> {
    sender: SenderSession<B>,
    pending: VecDeque<Vec<u8>>,
    transcript: Vec<TranscriptEntry>,
}

impl<B: Backend> Loopback<B> {
    pub fn new(sender: SenderSession<B>) -> Self {
        Loopback {
            sender,
            pending: VecDeque::new(),
            transcript: Vec::new(),
        }
    }

    pub fn sender(&self) -> &SenderSession<B> {
        &self.sender
    }
}

impl<B: Backend> Transport for Loopback<B> {
    fn send(&mut self, frame: &[u8]) -> Result<(), WireError> {
        self.transcript.push(TranscriptEntry {
            to_sender: true,
            frame: frame.to_vec(),
        });
        let reply = self.sender.step(frame)?;
        self.transcript.push(TranscriptEntry {
            to_sender: false,
            frame: reply.clone(),
        });
        self.pending.push_back(reply);
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<u8>, WireError> {
        self.pending
            .pop_front()
            .ok_or_else(|| WireError::ProtocolState("no pending reply".into()))
    }

    fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }
}

/// A framed TCP connection.
pub struct TcpTransport {
    stream: TcpStream,
    transcript: Vec<TranscriptEntry>,
}

impl TcpTransport {
    pub fn connect(addr: &str) -> Result<Self, WireError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true).ok();
        Ok(TcpTransport {
            stream,
            transcript: Vec::new(),
        })
    }
}

impl Transport for TcpTransport {
    fn send(&mut self, frame: &[u8]) -> Result<(), WireError> {
        self.transcript.push(TranscriptEntry {
            to_sender: true,
            frame: frame.to_vec(),
        });
        write_frame(&mut self.stream, frame)
    }

    fn recv(&mut self) -> Result<Vec<u8>, WireError> {
        let frame = read_frame(&mut self.stream)?;
        self.transcript.push(TranscriptEntry {
            to_sender: false,
            frame: frame.clone(),
        });
        Ok(frame)
    }

    fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }
}

/// Serves sender sessions on a listener, one session per connection.
/// Session seeds derive from `seed` and the connection index so reruns
/// with the same seed replay byte-identically. `max_conns` bounds the
/// number of accepted connections (useful for tests); `None` serves
/// forever.
pub fn serve<B: Backend>(
    listener: TcpListener,
    crs: Arc<Crs<B>>,
    keys: Arc<SenderKeys<B>>,
    quota: u32,
    seed: u64,
    max_conns: Option<usize>,
) -> Result<(), WireError> {
    let mut handles = Vec::new();
    let mut accepted = 0usize;
    for stream in listener.incoming() {
        let mut stream = stream?;
        let session_seed = seed.wrapping_add(accepted as u64);
        let crs = Arc::clone(&crs);
        let keys = Arc::clone(&keys);
        handles.push(std::thread::spawn(move || {
            let mut session = SenderSession::new(crs, keys, quota, session_seed);
            loop {
                let frame = match read_frame(&mut stream) {
                    Ok(f) => f,
                    Err(_) => break, // peer closed or sent garbage framing
                };
                match session.step(&frame) {
                    Ok(reply) => {
                        if write_frame(&mut stream, &reply).is_err() {
                            break;
                        }
                    }
                    // Undecodable or out-of-place message: drop the
                    // connection rather than answer.
                    Err(_) => break,
                }
            }
        }));
        accepted += 1;
        if let Some(max) = max_conns {
            if accepted >= max {
                break;
            }
        }
    }
    for h in handles {
        let _ = h.join();
    }
    Ok(())
}
