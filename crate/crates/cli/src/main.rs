use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use negdb_core::bench;
use negdb_core::codec::clock_from_env;
use negdb_core::crypto::generate_keypair;
use negdb_core::{CodecVariant, DigestWindow, Encoder, KeyFile, StoreOptions, TableStore};

const EXIT_OK: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "negdb", version, about = "Negative-database record store")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Config {
    /// Table file.
    #[arg(long = "db", global = true, default_value = "negdb.tbl")]
    db_path: PathBuf,
    /// Key file: decimal n, e and optionally d, one per line.
    #[arg(long = "keyfile", global = true, default_value = "negdb.key")]
    keyfile_path: PathBuf,
    #[arg(long, global = true, default_value_t = negdb_core::cache::DEFAULT_CAPACITY)]
    cache_capacity: usize,
    /// ASCII encoding variant: separator or mul10.
    #[arg(long = "codec", global = true, default_value = "separator")]
    codec_variant: CodecVariant,
    #[arg(long, global = true, default_value_t = DigestWindow::DEFAULT_START)]
    digest_start: usize,
    #[arg(long, global = true, default_value_t = DigestWindow::DEFAULT_WIDTH)]
    digest_width: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create an empty table and a fresh key file.
    Init {
        #[arg(long, default_value_t = 512)]
        bits: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Store a secret under NAME; prints the timestamp key.
    Insert {
        name: String,
        secret: String,
        /// Decoy rows to mix in.
        #[arg(long = "chaff", default_value_t = 0)]
        chaff_count: usize,
    },
    /// Exit 0 if SECRET matches NAME, 1 if not, 2 if NAME is unknown.
    Verify { name: String, secret: String },
    /// Print rows whose name or stored value contains SUBSTRING.
    Raw { substring: String },
    /// Print every row as stored.
    Dump,
    /// Print cache counters, after optionally looking up some names.
    Stats {
        #[arg(long = "lookup")]
        lookups: Vec<String>,
    },
    /// Time the encoding pipeline for secret lengths 1..=MAX_LEN.
    Bench {
        #[arg(long, default_value_t = 64)]
        max_len: usize,
        #[arg(long, default_value_t = bench::DEFAULT_REPS)]
        reps: usize,
    },
}

impl Config {
    fn encoder(&self) -> Result<Encoder> {
        Ok(Encoder {
            variant: self.codec_variant,
            window: DigestWindow::new(self.digest_start, self.digest_width)?,
        })
    }

    fn open_store(&self) -> Result<TableStore> {
        if !self.db_path.exists() {
            bail!("{} does not exist; run `negdb init` first", self.db_path.display());
        }
        let options = StoreOptions {
            encoder: self.encoder()?,
            cache_capacity: self.cache_capacity,
            clock: clock_from_env()?,
            chaff_seed: None,
        };
        TableStore::open(&self.db_path, options)
            .with_context(|| format!("loading {}", self.db_path.display()))
    }

    fn keys(&self) -> Result<KeyFile> {
        KeyFile::load(&self.keyfile_path)
            .with_context(|| format!("reading key file {}", self.keyfile_path.display()))
    }
}

fn non_empty(path: &Path) -> bool {
    path.metadata().is_ok_and(|m| m.len() > 0)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<u8> {
    let config = &cli.config;
    match cli.command {
        Command::Init { bits, seed } => {
            if non_empty(&config.db_path) {
                bail!("{} already exists and is not empty", config.db_path.display());
            }
            if non_empty(&config.keyfile_path) {
                bail!("{} already exists and is not empty", config.keyfile_path.display());
            }
            let (public, private) = generate_keypair(bits, seed)?;
            KeyFile { public, private: Some(private) }.save(&config.keyfile_path)?;
            TableStore::create(&config.db_path)?;
            Ok(EXIT_OK)
        }
        Command::Insert { name, secret, chaff_count } => {
            let keys = config.keys()?;
            let store = config.open_store()?;
            let key = store.insert_record(&name, &secret, &keys.public, chaff_count)?;
            writeln!(out, "{key}")?;
            Ok(EXIT_OK)
        }
        Command::Verify { name, secret } => {
            let keys = config.keys()?;
            let store = config.open_store()?;
            if store.verify_record(&name, &secret, &keys.public)? {
                writeln!(out, "match")?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "no match")?;
                Ok(EXIT_MISMATCH)
            }
        }
        Command::Raw { substring } => {
            let store = config.open_store()?;
            for (name, stored) in store.raw_query(&substring) {
                writeln!(out, "{name}\t{stored}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Dump => {
            let store = config.open_store()?;
            for row in store.rows() {
                writeln!(out, "{row}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats { lookups } => {
            let store = config.open_store()?;
            for name in &lookups {
                store.lookup(name);
            }
            writeln!(out, "{}", store.cache_stats())?;
            Ok(EXIT_OK)
        }
        Command::Bench { max_len, reps } => {
            if reps < 100 {
                bail!("--reps must be at least 100");
            }
            let keys = config.keys()?;
            // the store is only checked for presence; bench writes to a scratch table
            config.open_store()?;
            let rows = bench::run(max_len, reps, config.encoder()?, &keys.public)?;
            out.write_all(bench::render_csv(&rows).as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let _ = out.flush();
            eprintln!("negdb: error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
