//! Sender and receiver session state machines.
//!
//! A sender session serves one logical peer: it answers issue and
//! transfer requests, enforces the per-session transfer quota `k`, and
//! consults an approval hook before doing any work (the procedural
//! equivalent of the ideal functionality's approval bit). It never
//! answers a request whose proof failed verification.
//!
//! A receiver session drives the request/await/finalize round trips over
//! a transport and refuses to start a transfer before an attribute key
//! has been finalized.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use aothap_core::artifacts::PublishedDb;
use aothap_core::attributes::AttributeList;
use aothap_core::bilinear::{Backend, Gt};
use aothap_core::protocol::{
    issue_finalize, issue_request, issue_respond, transfer_finalize, transfer_request,
    transfer_respond, AttributeSecretKey, Crs, ProtocolError, SenderKeys,
};

use crate::frame::{decode_message, encode_message, Message, RejectReason, WireError};
use crate::transport::Transport;

/// Approval decisions for the two request kinds. The protocol carries no
/// receiver identity, so the hook's inputs are deliberately thin; richer
/// policies belong to deployments.
pub trait ApprovalHook: Send {
    fn approve_issue(&mut self) -> bool {
        true
    }
    fn approve_transfer(&mut self) -> bool {
        true
    }
}

/// Approves everything.
pub struct ApproveAll;
impl ApprovalHook for ApproveAll {}

/// Fixed answers, handy in tests.
pub struct FixedApproval {
    pub issue: bool,
    pub transfer: bool,
}
impl ApprovalHook for FixedApproval {
    fn approve_issue(&mut self) -> bool {
        self.issue
    }
    fn approve_transfer(&mut self) -> bool {
        self.transfer
    }
}

pub struct SenderSession<B: Backend> {
    crs: Arc<Crs<B>>,
    keys: Arc<SenderKeys<B>>,
    quota: u32,
    transfers_done: u32,
    issued: bool,
    hook: Box<dyn ApprovalHook>,
    rng: ChaCha20Rng,
}

impl<B: Backend> SenderSession<B> {
    pub fn new(crs: Arc<Crs<B>>, keys: Arc<SenderKeys<B>>, quota: u32, seed: u64) -> Self {
        Self::with_hook(crs, keys, quota, seed, Box::new(ApproveAll))
    }

    pub fn with_hook(
        crs: Arc<Crs<B>>,
        keys: Arc<SenderKeys<B>>,
        quota: u32,
        seed: u64,
        hook: Box<dyn ApprovalHook>,
    ) -> Self {
        SenderSession {
            crs,
            keys,
            quota,
            transfers_done: 0,
            issued: false,
            hook,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn transfers_done(&self) -> u32 {
        self.transfers_done
    }

    /// Handles one incoming frame and produces the reply frame. Requests
    /// that decode but fail a policy or proof check get a reject message;
    /// frames that do not decode as a request are connection-level
    /// errors.
    pub fn step(&mut self, frame: &[u8]) -> Result<Vec<u8>, WireError> {
        let msg = decode_message::<B>(&self.crs.group, frame)?;
        let reply = match msg {
            Message::IssueReq(req) => {
                if self.issued {
                    // Issue runs once per session.
                    Message::IssueReject(RejectReason::OutOfOrder)
                } else if !self.hook.approve_issue() {
                    Message::IssueReject(RejectReason::Denied)
                } else {
                    match issue_respond(&self.crs, &self.keys.sk, &req, &mut self.rng) {
                        Ok(resp) => {
                            self.issued = true;
                            Message::IssueResp(resp)
                        }
                        Err(_) => Message::IssueReject(RejectReason::ProofInvalid),
                    }
                }
            }
            Message::TransferReq(req) => {
                if self.transfers_done >= self.quota {
                    Message::TransferReject(RejectReason::Quota)
                } else if !self.hook.approve_transfer() {
                    Message::TransferReject(RejectReason::Denied)
                } else {
                    match transfer_respond(&self.crs, &self.keys.pk, &self.keys.sk, &req, &mut self.rng)
                    {
                        Ok(resp) => {
                            self.transfers_done += 1;
                            Message::TransferResp(resp)
                        }
                        Err(_) => Message::TransferReject(RejectReason::ProofInvalid),
                    }
                }
            }
            other => {
                return Err(WireError::ProtocolState(format!(
                    "sender cannot handle {:?} messages",
                    other.tag()
                )))
            }
        };
        Ok(encode_message(&reply))
    }
}

pub struct ReceiverSession<B: Backend> {
    crs: Arc<Crs<B>>,
    db: Arc<PublishedDb<B>>,
    ask: Option<AttributeSecretKey<B>>,
    recovered: Vec<(usize, Gt<B>)>,
    rng: ChaCha20Rng,
}

impl<B: Backend> ReceiverSession<B> {
    pub fn new(crs: Arc<Crs<B>>, db: Arc<PublishedDb<B>>, seed: u64) -> Self {
        ReceiverSession {
            crs,
            db,
            ask: None,
            recovered: Vec::new(),
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn ask(&self) -> Option<&AttributeSecretKey<B>> {
        self.ask.as_ref()
    }

    pub fn recovered(&self) -> &[(usize, Gt<B>)] {
        &self.recovered
    }

    /// Runs the issue round trip and stores the finalized key.
    pub fn run_issue(
        &mut self,
        transport: &mut dyn Transport,
        list: &AttributeList,
    ) -> Result<(), WireError> {
        let (request, secret) = issue_request(&self.crs, list, &mut self.rng)?;
        transport.send(&encode_message(&Message::IssueReq(request)))?;
        let reply = transport.recv()?;
        match decode_message::<B>(&self.crs.group, &reply)? {
            Message::IssueResp(resp) => {
                let ask = issue_finalize(&self.crs, &self.db.pk, &secret, &resp)?;
                self.ask = Some(ask);
                Ok(())
            }
            Message::IssueReject(reason) => Err(WireError::Rejected(reason)),
            other => Err(WireError::ProtocolState(format!(
                "expected an issue response, got {:?}",
                other.tag()
            ))),
        }
    }

    /// Runs one transfer round trip for record `sigma` and returns the
    /// decrypted target-group element.
    pub fn run_transfer(
        &mut self,
        transport: &mut dyn Transport,
        sigma: usize,
    ) -> Result<Gt<B>, WireError> {
        let ask = self
            .ask
            .as_ref()
            .ok_or_else(|| {
                WireError::ProtocolState("transfer requires a finalized attribute key".into())
            })?
            .clone();
        let record = self.db.records.get(sigma).ok_or_else(|| {
            WireError::ProtocolState(format!("record index {sigma} out of range"))
        })?;
        let (request, secret) =
            transfer_request(&self.crs, &self.db.pk, record, sigma, &mut self.rng)?;
        transport.send(&encode_message(&Message::TransferReq(request)))?;
        let reply = transport.recv()?;
        match decode_message::<B>(&self.crs.group, &reply)? {
            Message::TransferResp(resp) => {
                let out = transfer_finalize(&self.crs, &self.db.pk, &ask, record, &secret, &resp)?;
                self.recovered.push((sigma, out.clone()));
                Ok(out)
            }
            Message::TransferReject(reason) => Err(WireError::Rejected(reason)),
            other => Err(WireError::ProtocolState(format!(
                "expected a transfer response, got {:?}",
                other.tag()
            ))),
        }
    }
}

impl From<ProtocolError> for RejectReason {
    fn from(_: ProtocolError) -> Self {
        RejectReason::ProofInvalid
    }
}
