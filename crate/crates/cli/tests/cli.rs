use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        Self { dir: TempDir::new().unwrap() }
    }

    fn db(&self) -> PathBuf {
        self.dir.path().join("t.tbl")
    }

    fn key(&self) -> PathBuf {
        self.dir.path().join("t.key")
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_with_clock(None, args)
    }

    fn run_with_clock(&self, clock: Option<&str>, args: &[&str]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_negdb"));
        cmd.arg("--db").arg(self.db()).arg("--keyfile").arg(self.key()).args(args);
        match clock {
            Some(c) => cmd.env("NEGDB_CLOCK", c),
            None => cmd.env_remove("NEGDB_CLOCK"),
        };
        cmd.output().unwrap()
    }

    fn init(&self) {
        let out = self.run(&["init", "--bits", "256", "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn line_count(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn init_creates_files_once() {
    let env = Env::new();
    env.init();
    assert_eq!(std::fs::read_to_string(env.db()).unwrap(), "negdb 1\n");
    assert_eq!(std::fs::read_to_string(env.key()).unwrap().lines().count(), 3);
    let again = env.run(&["init", "--bits", "256", "--seed", "7"]);
    assert_eq!(again.status.code(), Some(2));
}

#[test]
fn seeded_init_is_reproducible() {
    let a = Env::new();
    let b = Env::new();
    a.init();
    b.init();
    assert_eq!(std::fs::read(a.key()).unwrap(), std::fs::read(b.key()).unwrap());
}

#[test]
fn insert_prints_clock_key_and_appends_eight_rows() {
    let env = Env::new();
    env.init();
    let out = env.run_with_clock(Some("2008-05-29T14:30:05"), &["insert", "NIVEETA", "123-45-6789"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "200805291430051\n");
    assert_eq!(line_count(&env.db()), 1 + 8);

    let dup = env.run_with_clock(Some("2008-05-29T14:30:05"), &["insert", "NIVEETA", "x"]);
    assert_eq!(dup.status.code(), Some(2));
    assert_eq!(line_count(&env.db()), 1 + 8);

    let chaff = env.run_with_clock(Some("2008-05-29T14:30:06"), &["insert", "ANUP", "pw", "--chaff", "5"]);
    assert_eq!(chaff.status.code(), Some(0));
    assert_eq!(line_count(&env.db()), 1 + 8 + 13);
}

#[test]
fn insert_rejects_tab_in_name_and_bad_clock() {
    let env = Env::new();
    env.init();
    assert_eq!(env.run(&["insert", "a\tb", "pw"]).status.code(), Some(2));
    let bad = env.run_with_clock(Some("yesterday"), &["insert", "a", "pw"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(line_count(&env.db()), 1);
}

#[test]
fn verify_exit_codes() {
    let env = Env::new();
    env.init();
    assert_eq!(env.run(&["insert", "alice", "correct horse"]).status.code(), Some(0));
    assert_eq!(env.run(&["verify", "alice", "correct horse"]).status.code(), Some(0));
    assert_eq!(env.run(&["verify", "alice", "correct house"]).status.code(), Some(1));
    assert_eq!(env.run(&["verify", "bob", "correct horse"]).status.code(), Some(2));
}

#[test]
fn commands_before_init_fail() {
    let env = Env::new();
    assert_eq!(env.run(&["raw", ""]).status.code(), Some(2));
    assert_eq!(env.run(&["verify", "a", "b"]).status.code(), Some(2));
}

#[test]
fn raw_output_is_fragments_only() {
    let env = Env::new();
    env.init();
    env.run_with_clock(Some("2008-05-29T14:30:05"), &["insert", "NIVEETA", "123-45-6789"]);
    env.run_with_clock(Some("2008-05-29T14:30:05"), &["insert", "ANUP", "987-65-4321"]);

    let by_name = env.run(&["raw", "NIVEETA"]);
    assert_eq!(by_name.status.code(), Some(0));
    let text = stdout(&by_name);
    assert_eq!(text.lines().count(), 8);
    for line in text.lines() {
        let (name, stored) = line.split_once('\t').unwrap();
        assert_eq!(name, "NIVEETA");
        assert_eq!(stored.len(), 17);
        assert_eq!(&stored[1..], "*200805291430051");
    }
    assert_eq!(stdout(&env.run(&["raw", "123-45-6789"])), "");
    assert_eq!(stdout(&env.run(&["raw", ""])).lines().count(), 16);
}

#[test]
fn dump_matches_table_body() {
    let env = Env::new();
    env.init();
    env.run(&["insert", "alice", "pw", "--chaff", "2"]);
    let dump = stdout(&env.run(&["dump"]));
    let file = std::fs::read_to_string(env.db()).unwrap();
    assert_eq!(format!("negdb 1\n{dump}"), file);
}

#[test]
fn stats_line() {
    let env = Env::new();
    env.init();
    env.run(&["insert", "alice", "pw"]);
    let out = env.run(&["stats", "--lookup", "alice", "--lookup", "alice", "--lookup", "nobody"]);
    assert_eq!(stdout(&out), "hits=1 misses=2 evictions=0\n");
    assert_eq!(stdout(&env.run(&["stats"])), "hits=0 misses=0 evictions=0\n");
}

#[test]
fn codec_and_window_flags_change_the_encoding() {
    let env = Env::new();
    env.init();
    env.run_with_clock(Some("2008-05-29T14:30:05"), &["insert", "a", "pw", "--codec", "mul10", "--digest-width", "4"]);
    assert_eq!(line_count(&env.db()), 1 + 4);
    assert_eq!(env.run(&["verify", "a", "pw", "--codec", "mul10", "--digest-width", "4"]).status.code(), Some(0));
    assert_eq!(env.run(&["verify", "a", "pw"]).status.code(), Some(1));
    assert_eq!(env.run(&["raw", "", "--digest-start", "30"]).status.code(), Some(2));
}

#[test]
fn bench_csv() {
    let env = Env::new();
    env.init();
    let out = env.run(&["bench", "--max-len", "8", "--reps", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("len,encode_ns,rows"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], (i + 1).to_string());
        assert!(cols[1].parse::<u128>().unwrap() > 0);
        assert_eq!(cols[2], "8");
    }
    assert_eq!(env.run(&["bench", "--reps", "10"]).status.code(), Some(2));
    // bench must not touch the user's table
    assert_eq!(line_count(&env.db()), 1);
}
