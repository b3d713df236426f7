//! The `aothap` command line.
//!
//! Subcommands mirror the protocol phases and read/write the artifact
//! files; `serve` and `client` speak the framed protocol over TCP, and
//! `bench` prints per-phase operation counts. Failures exit nonzero with
//! one JSON line on stderr: `{"error": ..., "reason": ...}`.
//!
//! The backend for `crs-setup` and `bench` comes from `AOTHAP_BACKEND`
//! (`real` or `mock`; `AOTHAP_MOCK_P` overrides the mock modulus). Every
//! other subcommand reads the backend from the artifact headers. All
//! randomness is seedable via `--seed` for reproducible runs.

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;

use aothap_core::artifacts::{self, PublishedDb};
use aothap_core::attributes::{self, AttributeList, AttributeUniverse};
use aothap_core::bilinear::{bilinear_setup, Backend, SecurityProfile};
use aothap_core::codec::{self, Reader};
use aothap_core::protocol::{
    self, crs_setup, db_setup, verify_db, Crs, DbRejection, ProtocolError, SenderKeys,
};
use aothap_core::testkit::{counted, BenchRow};
use aothap_core::{MockBackend, Real};

use crate::frame::{decode_message, encode_message, Message, WireError};
use crate::session::SenderSession;
use crate::transport::{serve, Loopback, TcpTransport, Transport};

/// Default modulus for the mock backend: 2^61 - 1.
pub const DEFAULT_MOCK_P: u64 = 2305843009213693951;

#[derive(Parser)]
#[command(
    name = "aothap",
    about = "Adaptive k-out-of-N oblivious transfer with hidden access policies",
    version
)]
pub struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the common reference string for an attribute universe.
    CrsSetup {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a record database and write the public and secret halves.
    DbSetup {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long)]
        records: PathBuf,
        #[arg(long = "out-pub")]
        out_pub: PathBuf,
        #[arg(long = "out-sk")]
        out_sk: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Publicly verify a published database.
    VerifyDb {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
    },
    /// Build an issue request for an attribute list.
    IssueRequest {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long)]
        choose: PathBuf,
        #[arg(long = "out-request")]
        out_request: PathBuf,
        #[arg(long = "out-secret")]
        out_secret: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Answer an issue request with a blinded attribute key.
    IssueRespond {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(long = "out-response")]
        out_response: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Unblind and check the issued attribute key.
    IssueFinalize {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        secret: PathBuf,
        #[arg(long)]
        response: PathBuf,
        #[arg(long = "out-ask")]
        out_ask: PathBuf,
    },
    /// Build a transfer request for one record.
    TransferRequest {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        index: usize,
        #[arg(long = "out-request")]
        out_request: PathBuf,
        #[arg(long = "out-secret")]
        out_secret: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Answer a transfer request with a masked decryption share.
    TransferRespond {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        request: PathBuf,
        #[arg(long = "out-response")]
        out_response: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt the chosen record from the response.
    TransferFinalize {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        ask: PathBuf,
        #[arg(long)]
        index: usize,
        #[arg(long)]
        secret: PathBuf,
        #[arg(long)]
        response: PathBuf,
        /// Write the recovered payload bytes here (stdout summary otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve sender sessions over TCP.
    Serve {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        addr: String,
        #[arg(long, default_value_t = 4)]
        quota: u32,
        #[arg(long)]
        seed: Option<u64>,
        /// Exit after this many connections (serves forever otherwise).
        #[arg(long = "max-conns")]
        max_conns: Option<usize>,
    },
    /// Run issue plus transfers against a server.
    Client {
        #[arg(long)]
        crs: PathBuf,
        #[arg(long = "pub")]
        pub_file: PathBuf,
        #[arg(long)]
        addr: String,
        #[arg(long)]
        choose: PathBuf,
        /// Comma-separated record indices to transfer, in order.
        #[arg(long)]
        indices: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for recovered payloads (record-<i>.bin).
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        /// Write the wire transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Print operation-count tables for a full protocol run.
    Bench {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long = "db-size", default_value_t = 16)]
        db_size: usize,
        #[arg(long, default_value_t = 4)]
        transfers: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub reason: String,
    pub message: String,
}

impl CliError {
    fn new(reason: &str, message: impl Into<String>) -> Self {
        CliError {
            reason: reason.into(),
            message: message.into(),
        }
    }
}

macro_rules! cli_from {
    ($ty:ty, $reason:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($reason, e.to_string())
            }
        }
    };
}

cli_from!(std::io::Error, "io");
cli_from!(aothap_core::codec::CodecError, "decode-failed");
cli_from!(attributes::AttrError, "bad-input");
cli_from!(aothap_core::bilinear::SetupError, "unknown-profile");
cli_from!(aothap_core::bilinear::CounterError, "internal");

impl From<DbRejection> for CliError {
    fn from(e: DbRejection) -> Self {
        let reason = match e {
            DbRejection::RecordCheckFailed { .. } => "record-check-failed",
            DbRejection::MalformedRecord { .. } => "record-check-failed",
            DbRejection::KeyProofInvalid => "key-proof-invalid",
        };
        CliError::new(reason, e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::new(protocol_reason(&e), e.to_string())
    }
}

impl From<WireError> for CliError {
    fn from(e: WireError) -> Self {
        let reason = match &e {
            WireError::Rejected(r) => r.code(),
            WireError::Codec(_) => "decode-failed",
            WireError::Protocol(p) => protocol_reason(p),
            WireError::Io(_) => "io",
            _ => "wire",
        };
        CliError::new(reason, e.to_string())
    }
}

fn protocol_reason(e: &ProtocolError) -> &'static str {
    match e {
        ProtocolError::ProofInvalid | ProtocolError::ResponseProofInvalid => "proof-invalid",
        ProtocolError::KeyCheckFailed { .. } => "key-check-failed",
        ProtocolError::MalformedRecord => "record-check-failed",
        ProtocolError::EmptyDatabase | ProtocolError::Attr(_) => "bad-input",
        ProtocolError::Gs(_) => "proof-invalid",
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliArgs::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/usage.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.message, "reason": e.reason })
            );
            1
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn env_backend() -> Result<&'static str, CliError> {
    match std::env::var("AOTHAP_BACKEND").as_deref() {
        Err(_) | Ok("real") => Ok("real"),
        Ok("mock") => Ok("mock"),
        Ok(other) => Err(CliError::new(
            "unknown-profile",
            format!("AOTHAP_BACKEND must be `real` or `mock`, got `{other}`"),
        )),
    }
}

fn mock_modulus() -> Result<u64, CliError> {
    match std::env::var("AOTHAP_MOCK_P") {
        Err(_) => Ok(DEFAULT_MOCK_P),
        Ok(s) => s
            .parse()
            .map_err(|_| CliError::new("bad-input", "AOTHAP_MOCK_P must be an integer")),
    }
}

fn load_crs<B: Backend>(path: &Path) -> Result<Crs<B>, CliError> {
    Ok(artifacts::decode_crs::<B>(&read_file(path)?)?)
}

fn load_db<B: Backend>(path: &Path, crs: &Crs<B>) -> Result<PublishedDb<B>, CliError> {
    Ok(artifacts::decode_published_db::<B>(&read_file(path)?, crs)?)
}

fn crs_backend_tag(path: &Path) -> Result<u8, CliError> {
    Ok(artifacts::peek_backend_tag(&read_file(path)?)?)
}

/// Dispatches `$body` with `$B` bound to the backend the artifact names.
macro_rules! with_backend {
    ($tag:expr, $B:ident, $body:block) => {{
        let tag = $tag;
        if tag == <Real as Backend>::TAG {
            type $B = Real;
            $body
        } else if tag == <MockBackend as Backend>::TAG {
            type $B = MockBackend;
            $body
        } else {
            Err(CliError::new(
                "decode-failed",
                format!("unknown backend tag {tag}"),
            ))
        }
    }};
}

#[derive(Deserialize)]
struct RecordEntry {
    allow: Vec<Vec<String>>,
    message: String,
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::CrsSetup { universe, out, seed } => {
            let u = attributes::parse_universe(&read_text(&universe)?)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            match env_backend()? {
                "mock" => {
                    let group =
                        bilinear_setup::<MockBackend>(&SecurityProfile::Mock(mock_modulus()?))?;
                    let (crs, _) = crs_setup(&group, &u, &mut rng, false);
                    write_file(&out, &artifacts::encode_crs(&crs))?;
                }
                _ => {
                    let group = bilinear_setup::<Real>(&SecurityProfile::Standard128)?;
                    let (crs, _) = crs_setup(&group, &u, &mut rng, false);
                    write_file(&out, &artifacts::encode_crs(&crs))?;
                }
            }
            println!("wrote {}", out.display());
            Ok(())
        }

        Command::DbSetup {
            crs,
            records,
            out_pub,
            out_sk,
            seed,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let entries: Vec<RecordEntry> = serde_json::from_str(&read_text(&records)?)
                .map_err(|e| CliError::new("bad-input", e.to_string()))?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            let mut payloads = Vec::with_capacity(entries.len());
            for entry in &entries {
                let policy = attributes::policy_from_labels(&crs.universe, &entry.allow)?;
                payloads.push((crs.group.random_gt(&mut rng), policy));
            }
            let (keys, cdb) = db_setup(&crs, &payloads, &mut rng)?;
            let sealed = entries
                .iter()
                .zip(&payloads)
                .map(|(entry, (gt, _))| artifacts::seal_bytes(gt, entry.message.as_bytes()))
                .collect();
            let db = PublishedDb {
                pk: keys.pk.clone(),
                psi: keys.psi.clone(),
                records: cdb,
                sealed,
            };
            write_file(&out_pub, &artifacts::encode_published_db(&db))?;
            write_file(&out_sk, &artifacts::encode_secret_key(&keys.sk))?;
            println!(
                "wrote {} ({} records) and {}",
                out_pub.display(),
                db.records.len(),
                out_sk.display()
            );
            Ok(())
        }),

        Command::VerifyDb { crs, pub_file } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let db = load_db::<B>(&pub_file, &crs)?;
            verify_db(&crs, &db.pk, &db.psi, &db.records)?;
            println!("database verifies: {} records", db.records.len());
            Ok(())
        }),

        Command::IssueRequest {
            crs,
            choose,
            out_request,
            out_secret,
            seed,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let list = attributes::parse_list(&crs.universe, &read_text(&choose)?)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            let (request, secret) = protocol::issue_request(&crs, &list, &mut rng)?;
            write_file(&out_request, &encode_message(&Message::IssueReq(request)))?;
            let mut sec = Vec::new();
            codec::put_issue_secret(&mut sec, &secret);
            write_file(&out_secret, &sec)?;
            println!("wrote {} and {}", out_request.display(), out_secret.display());
            Ok(())
        }),

        Command::IssueRespond {
            crs,
            sk,
            request,
            out_response,
            seed,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let sk = artifacts::decode_secret_key::<B>(&read_file(&sk)?, &crs.group)?;
            let frame = read_file(&request)?;
            let req = match decode_message::<B>(&crs.group, &frame)? {
                Message::IssueReq(req) => req,
                other => {
                    return Err(CliError::new(
                        "decode-failed",
                        format!("expected an issue request, got {:?}", other.tag()),
                    ))
                }
            };
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            let resp = protocol::issue_respond(&crs, &sk, &req, &mut rng)?;
            write_file(&out_response, &encode_message(&Message::IssueResp(resp)))?;
            println!("wrote {}", out_response.display());
            Ok(())
        }),

        Command::IssueFinalize {
            crs,
            pub_file,
            secret,
            response,
            out_ask,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let db = load_db::<B>(&pub_file, &crs)?;
            let secret_bytes = read_file(&secret)?;
            let mut r = Reader::new(&secret_bytes);
            let secret = codec::get_issue_secret(&mut r, &crs.group)?;
            r.finish().map_err(aothap_core::codec::CodecError::from)?;
            let frame = read_file(&response)?;
            let resp = match decode_message::<B>(&crs.group, &frame)? {
                Message::IssueResp(resp) => resp,
                Message::IssueReject(reason) => {
                    return Err(CliError::new(reason.code(), "issue was rejected"))
                }
                other => {
                    return Err(CliError::new(
                        "decode-failed",
                        format!("expected an issue response, got {:?}", other.tag()),
                    ))
                }
            };
            let ask = protocol::issue_finalize(&crs, &db.pk, &secret, &resp)?;
            write_file(&out_ask, &artifacts::encode_ask(&ask))?;
            println!("wrote {}", out_ask.display());
            Ok(())
        }),

        Command::TransferRequest {
            crs,
            pub_file,
            index,
            out_request,
            out_secret,
            seed,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let db = load_db::<B>(&pub_file, &crs)?;
            let record = db.records.get(index).ok_or_else(|| {
                CliError::new("bad-input", format!("record index {index} out of range"))
            })?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            let (request, secret) =
                protocol::transfer_request(&crs, &db.pk, record, index, &mut rng)?;
            write_file(&out_request, &encode_message(&Message::TransferReq(request)))?;
            let mut sec = Vec::new();
            codec::put_transfer_secret(&mut sec, &secret);
            write_file(&out_secret, &sec)?;
            println!("wrote {} and {}", out_request.display(), out_secret.display());
            Ok(())
        }),

        Command::TransferRespond {
            crs,
            pub_file,
            sk,
            request,
            out_response,
            seed,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let db = load_db::<B>(&pub_file, &crs)?;
            let sk = artifacts::decode_secret_key::<B>(&read_file(&sk)?, &crs.group)?;
            let frame = read_file(&request)?;
            let req = match decode_message::<B>(&crs.group, &frame)? {
                Message::TransferReq(req) => req,
                other => {
                    return Err(CliError::new(
                        "decode-failed",
                        format!("expected a transfer request, got {:?}", other.tag()),
                    ))
                }
            };
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_random(seed));
            let resp = protocol::transfer_respond(&crs, &db.pk, &sk, &req, &mut rng)?;
            write_file(&out_response, &encode_message(&Message::TransferResp(resp)))?;
            println!("wrote {}", out_response.display());
            Ok(())
        }),

        Command::TransferFinalize {
            crs,
            pub_file,
            ask,
            index,
            secret,
            response,
            out,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = load_crs::<B>(&crs)?;
            let db = load_db::<B>(&pub_file, &crs)?;
            let ask = artifacts::decode_ask::<B>(&read_file(&ask)?, &crs.group)?;
            let record = db.records.get(index).ok_or_else(|| {
                CliError::new("bad-input", format!("record index {index} out of range"))
            })?;
            let secret_bytes = read_file(&secret)?;
            let mut r = Reader::new(&secret_bytes);
            let secret = codec::get_transfer_secret(&mut r, &crs.group)?;
            r.finish().map_err(aothap_core::codec::CodecError::from)?;
            let frame = read_file(&response)?;
            let resp = match decode_message::<B>(&crs.group, &frame)? {
                Message::TransferResp(resp) => resp,
                Message::TransferReject(reason) => {
                    return Err(CliError::new(reason.code(), "transfer was rejected"))
                }
                other => {
                    return Err(CliError::new(
                        "decode-failed",
                        format!("expected a transfer response, got {:?}", other.tag()),
                    ))
                }
            };
            let gt = protocol::transfer_finalize(&crs, &db.pk, &ask, record, &secret, &resp)?;
            let sealed = &db.sealed[index];
            if sealed.is_empty() {
                let hex: String = gt.to_bytes().iter().map(|b| format!("{b:02x}")).collect();
                match out {
                    Some(path) => {
                        write_file(&path, &gt.to_bytes())?;
                        println!("wrote {}", path.display());
                    }
                    None => println!("{hex}"),
                }
            } else {
                let bytes = artifacts::seal_bytes(&gt, sealed);
                match out {
                    Some(path) => {
                        write_file(&path, &bytes)?;
                        println!("wrote {} ({} bytes)", path.display(), bytes.len());
                    }
                    None => println!("{}", String::from_utf8_lossy(&bytes)),
                }
            }
            Ok(())
        }),

        Command::Serve {
            crs,
            pub_file,
            sk,
            addr,
            quota,
            seed,
            max_conns,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = Arc::new(load_crs::<B>(&crs)?);
            let db = load_db::<B>(&pub_file, &crs)?;
            let sk = artifacts::decode_secret_key::<B>(&read_file(&sk)?, &crs.group)?;
            let keys = Arc::new(SenderKeys {
                pk: db.pk.clone(),
                sk,
                psi: db.psi.clone(),
            });
            let listener = TcpListener::bind(&addr)?;
            println!("listening on {}", listener.local_addr()?);
            // Callers wait for the banner; stdout is block-buffered when
            // piped.
            use std::io::Write;
            std::io::stdout().flush()?;
            serve(listener, crs, keys, quota, seed_or_random(seed), max_conns)?;
            Ok(())
        }),

        Command::Client {
            crs,
            pub_file,
            addr,
            choose,
            indices,
            seed,
            out_dir,
            transcript,
        } => with_backend!(crs_backend_tag(&crs)?, B, {
            let crs = Arc::new(load_crs::<B>(&crs)?);
            let db = Arc::new(load_db::<B>(&pub_file, &crs)?);
            let list = attributes::parse_list(&crs.universe, &read_text(&choose)?)?;
            let indices = parse_indices(&indices)?;
            let mut transport = TcpTransport::connect(&addr)?;
            let mut session = crate::session::ReceiverSession::new(
                Arc::clone(&crs),
                Arc::clone(&db),
                seed_or_random(seed),
            );
            session.run_issue(&mut transport, &list)?;
            for &sigma in &indices {
                let gt = session.run_transfer(&mut transport, sigma)?;
                let bytes = if db.sealed[sigma].is_empty() {
                    gt.to_bytes()
                } else {
                    artifacts::seal_bytes(&gt, &db.sealed[sigma])
                };
                match &out_dir {
                    Some(dir) => {
                        std::fs::create_dir_all(dir)?;
                        let path = dir.join(format!("record-{sigma}.bin"));
                        write_file(&path, &bytes)?;
                        println!("record {sigma}: wrote {}", path.display());
                    }
                    None => println!("record {sigma}: {}", String::from_utf8_lossy(&bytes)),
                }
            }
            if let Some(path) = transcript {
                write_file(&path, &render_transcript(transport.transcript()))?;
            }
            Ok(())
        }),

        Command::Bench {
            universe,
            db_size,
            transfers,
            seed,
            csv,
        } => {
            let u = attributes::parse_universe(&read_text(&universe)?)?;
            let seed = seed_or_random(seed);
            let rows = match env_backend()? {
                "mock" => {
                    let group =
                        bilinear_setup::<MockBackend>(&SecurityProfile::Mock(mock_modulus()?))?;
                    run_bench(&group, &u, db_size, transfers, seed)?
                }
                _ => {
                    let group = bilinear_setup::<Real>(&SecurityProfile::Standard128)?;
                    run_bench(&group, &u, db_size, transfers, seed)?
                }
            };
            println!(
                "{:<14} {:<10} {:>9} {:>8} {:>8} {:>8} {:>10}",
                "phase", "label", "pairings", "exp_g1", "exp_g2", "exp_gt", "bytes"
            );
            for row in &rows {
                println!(
                    "{:<14} {:<10} {:>9} {:>8} {:>8} {:>8} {:>10}",
                    row.phase,
                    row.label,
                    row.counters.pairings,
                    row.counters.exp_g1,
                    row.counters.exp_g2,
                    row.counters.exp_gt,
                    row.bytes
                );
            }
            if let Some(path) = csv {
                let mut text = String::from(BenchRow::csv_header());
                text.push('\n');
                for row in &rows {
                    text.push_str(&row.to_csv());
                    text.push('\n');
                }
                write_file(&path, text.as_bytes())?;
            }
            Ok(())
        }
    }
}

fn parse_indices(spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::new("bad-input", format!("bad index `{s}`")))
        })
        .collect()
}

/// Transcript file format: per frame, one direction byte then the frame.
pub fn render_transcript(entries: &[crate::transport::TranscriptEntry]) -> Vec<u8> {
    let mut out = Vec::new();
    for e in entries {
        out.push(if e.to_sender { 0x3e } else { 0x3c }); // '>' / '<'
        out.extend_from_slice(&e.frame);
    }
    out
}

/// Full protocol run with counter scopes per phase.
fn run_bench<B: Backend>(
    group: &aothap_core::BilinearGroup<B>,
    universe: &AttributeUniverse,
    db_size: usize,
    transfers: usize,
    seed: u64,
) -> Result<Vec<BenchRow>, CliError> {
    use aothap_core::attributes::AccessPolicy;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rows = Vec::new();

    let (crs, counters) = counted("crs-setup", || {
        crs_setup(group, universe, &mut rng, false).0
    })?;
    rows.push(BenchRow {
        phase: "crs-setup".into(),
        label: "total".into(),
        counters,
        bytes: artifacts::encode_crs(&crs).len() as u64,
    });

    let records: Vec<_> = (0..db_size.max(1))
        .map(|_| (crs.group.random_gt(&mut rng), AccessPolicy::allow_all(universe)))
        .collect();

    let ((pk, sk), counters) = counted("db-keys", || protocol::sender_keygen(&crs, &mut rng))?;
    let keygen_counters = counters;
    let (cdb, counters) = counted("db-encrypt", || {
        protocol::encrypt_records(&crs, &pk, &sk, &records, &mut rng)
    })?;
    let cdb = cdb?;
    rows.push(BenchRow {
        phase: "db-setup".into(),
        label: "core".into(),
        counters: aothap_core::testkit::OpCounters {
            pairings: keygen_counters.pairings + counters.pairings,
            exp_g1: keygen_counters.exp_g1 + counters.exp_g1,
            exp_g2: keygen_counters.exp_g2 + counters.exp_g2,
            exp_gt: keygen_counters.exp_gt + counters.exp_gt,
        },
        bytes: 0,
    });
    let (psi, counters) = counted("db-psi", || {
        protocol::prove_key_consistency(&crs, &pk, &sk, &mut rng)
    })?;
    let psi = psi.map_err(ProtocolError::from)?;
    let keys = SenderKeys {
        pk: pk.clone(),
        sk,
        psi: psi.clone(),
    };
    let db = PublishedDb {
        pk,
        psi,
        records: cdb.clone(),
        sealed: vec![Vec::new(); cdb.len()],
    };
    rows.push(BenchRow {
        phase: "db-setup".into(),
        label: "key-proof".into(),
        counters,
        bytes: artifacts::encode_published_db(&db).len() as u64,
    });

    let (res, counters) = counted("verify-db", || {
        verify_db(&crs, &keys.pk, &keys.psi, &db.records)
    })?;
    res?;
    rows.push(BenchRow {
        phase: "verify-db".into(),
        label: "total".into(),
        counters,
        bytes: 0,
    });

    // One receiver: issue, then the requested number of transfers over
    // loopback.
    let list = AttributeList {
        choices: vec![0; universe.attribute_count()],
    };
    let crs_arc = Arc::new(crs);
    let keys_arc = Arc::new(keys);
    let mut loopback = Loopback::new(SenderSession::new(
        Arc::clone(&crs_arc),
        Arc::clone(&keys_arc),
        transfers as u32,
        seed ^ 0x5ead,
    ));
    let db_arc = Arc::new(db);
    let mut receiver = crate::session::ReceiverSession::new(
        Arc::clone(&crs_arc),
        Arc::clone(&db_arc),
        seed ^ 0xcafe,
    );

    let (res, counters) = counted("issue", || receiver.run_issue(&mut loopback, &list))?;
    res?;
    let issue_bytes: usize = loopback.transcript().iter().map(|e| e.frame.len()).sum();
    rows.push(BenchRow {
        phase: "issue".into(),
        label: "round-trip".into(),
        counters,
        bytes: issue_bytes as u64,
    });

    for j in 0..transfers {
        let sigma = j % db_arc.records.len();
        let before: usize = loopback.transcript().iter().map(|e| e.frame.len()).sum();
        let (res, counters) = counted(&format!("transfer-{j}"), || {
            receiver.run_transfer(&mut loopback, sigma)
        })?;
        res?;
        let after: usize = loopback.transcript().iter().map(|e| e.frame.len()).sum();
        rows.push(BenchRow {
            phase: "transfer".into(),
            label: format!("round-{j}"),
            counters,
            bytes: (after - before) as u64,
        });
    }
    Ok(rows)
}
