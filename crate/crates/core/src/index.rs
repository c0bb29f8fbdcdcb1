//! Block-based nearest-neighbour index over oDis keys, with I/O accounting.
//!
//! One sorted run per team member. Each run holds `(key, object_id)` for
//! every object of the space, where `key` is the object's oDis to that
//! member's virtual object, sorted by `(key, id)` and cut into blocks of `B`
//! entries. A block is the unit of I/O: every block handed out increments
//! the read counter.
//!
//! On disk each run is a file named `<fingerprint>.<member_index>.idx`:
//!
//! ```text
//! offset  size  field (little-endian)
//! 0       8     magic "RTCNNIDX"
//! 8       4     format version (1)
//! 12      4     dimension d
//! 16      4     partitions m
//! 20      4     member index of this file
//! 24      8     entries n
//! 32      8     block size B
//! 40      8     swap-out object id
//! 48      32    configuration fingerprint (SHA-256)
//! 80      8     composite-key stride (f64)
//! 88      40    zero padding
//! 128     16*n  records: key f64, object id u64; block b = records [bB, (b+1)B)
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RtcError};
use crate::model::{ObjectId, ObjectRecord, ObjectSpace};
use crate::ranking::{self, Fingerprint, Problem};

pub const MAGIC: &[u8; 8] = b"RTCNNIDX";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 128;
pub const RECORD_LEN: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub key: f64,
    pub id: ObjectId,
}

/// Snapshot of I/O counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoStats {
    pub blocks_read: u64,
    pub blocks_written: u64,
    pub queries_served: u64,
}

/// Shared, monotonically increasing I/O counters.
#[derive(Debug, Default)]
pub struct IoCounters {
    blocks_read: AtomicU64,
    blocks_written: AtomicU64,
    queries_served: AtomicU64,
}

impl IoCounters {
    pub fn add_read(&self, n: u64) {
        self.blocks_read.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_written(&self, n: u64) {
        self.blocks_written.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_query(&self) {
        self.queries_served.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> IoStats {
        IoStats {
            blocks_read: self.blocks_read.load(Ordering::Relaxed),
            blocks_written: self.blocks_written.load(Ordering::Relaxed),
            queries_served: self.queries_served.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.blocks_read.store(0, Ordering::Relaxed);
        self.blocks_written.store(0, Ordering::Relaxed);
        self.queries_served.store(0, Ordering::Relaxed);
    }
}

pub(crate) fn block_count(n: usize, block_size: usize) -> usize {
    n.div_ceil(block_size)
}

/// Iterator over the records of a space in blocks of `block_size`, counting
/// one read per block yielded.
pub struct BlockScan<'a> {
    records: &'a [ObjectRecord],
    block_size: usize,
    counters: &'a IoCounters,
}

impl<'a> Iterator for BlockScan<'a> {
    type Item = &'a [ObjectRecord];

    fn next(&mut self) -> Option<Self::Item> {
        if self.records.is_empty() {
            return None;
        }
        let take = self.block_size.min(self.records.len());
        let (block, rest) = self.records.split_at(take);
        self.records = rest;
        self.counters.add_read(1);
        Some(block)
    }
}

pub fn scan_blocks<'a>(
    space: &'a ObjectSpace,
    block_size: usize,
    counters: &'a IoCounters,
) -> Result<BlockScan<'a>> {
    if block_size == 0 {
        return Err(RtcError::InvalidArgument("block size must be at least 1".into()));
    }
    Ok(BlockScan {
        records: space.records(),
        block_size,
        counters,
    })
}

enum Store {
    Memory(Vec<IndexEntry>),
    File { path: PathBuf, file: Mutex<File> },
}

struct Partition {
    swap_out_id: ObjectId,
    store: Store,
}

/// Persistent or in-memory set of sorted runs for one ranking configuration.
pub struct NnIndex {
    fingerprint: Fingerprint,
    dimension: usize,
    len: usize,
    block_size: usize,
    stride: f64,
    partitions: Vec<Partition>,
    build_io: IoStats,
    io: IoCounters,
}

impl std::fmt::Debug for NnIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NnIndex")
            .field("fingerprint", &self.fingerprint)
            .field("partitions", &self.partitions.len())
            .field("len", &self.len)
            .field("block_size", &self.block_size)
            .finish()
    }
}

fn sorted_run(problem: &Problem<'_>, member: &ObjectRecord) -> Result<Vec<IndexEntry>> {
    let diff = problem.diff()?;
    let v = ranking::virtual_object_from_diff(&diff, member)?;
    let w = problem.weights.values();
    let mut run: Vec<IndexEntry> = problem
        .space
        .records()
        .iter()
        .map(|p| IndexEntry {
            key: ranking::odis_record(&v, p, w),
            id: p.id,
        })
        .collect();
    run.sort_unstable_by(|a, b| a.key.total_cmp(&b.key).then(a.id.cmp(&b.id)));
    Ok(run)
}

/// Smallest power of two strictly above every key, at least 1.
fn stride_for(max_key: f64) -> f64 {
    let mut s = 1.0;
    while s <= max_key && s.is_finite() {
        s *= 2.0;
    }
    s
}

impl NnIndex {
    /// Builds an in-memory index. Materialised blocks are tallied in
    /// [`NnIndex::build_io`] as if written.
    pub fn build(problem: &Problem<'_>, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(RtcError::InvalidArgument("block size must be at least 1".into()));
        }
        if problem.space.is_empty() {
            return Err(RtcError::EmptySpace);
        }
        let mut partitions = Vec::with_capacity(problem.team.members().len());
        let mut max_key: f64 = 0.0;
        for member in problem.team.members() {
            let run = sorted_run(problem, member)?;
            if let Some(last) = run.last() {
                max_key = max_key.max(last.key);
            }
            partitions.push(Partition {
                swap_out_id: member.id,
                store: Store::Memory(run),
            });
        }
        Ok(NnIndex {
            fingerprint: problem.fingerprint(),
            dimension: problem.space.dimension(),
            len: problem.space.len(),
            block_size,
            stride: stride_for(max_key),
            build_io: IoStats {
                blocks_written: (partitions.len() * block_count(problem.space.len(), block_size)) as u64,
                ..IoStats::default()
            },
            partitions,
            io: IoCounters::default(),
        })
    }

    /// Builds the index, writes one file per partition into `dir`, and
    /// returns a file-backed index over those files.
    pub fn build_to_dir(problem: &Problem<'_>, block_size: usize, dir: &Path) -> Result<Self> {
        let mem = NnIndex::build(problem, block_size)?;
        fs::create_dir_all(dir)?;
        let mut written = 0;
        for i in 0..mem.partitions.len() {
            let path = mem.partition_path(dir, i);
            let mut out = BufWriter::new(File::create(&path)?);
            out.write_all(&mem.header_bytes(i))?;
            if let Store::Memory(run) = &mem.partitions[i].store {
                for e in run {
                    out.write_all(&e.key.to_le_bytes())?;
                    out.write_all(&e.id.0.to_le_bytes())?;
                }
            }
            out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            written += block_count(mem.len, block_size) as u64;
        }
        let mut index = NnIndex::open(dir, &mem.fingerprint)?;
        index.build_io.blocks_written = written;
        Ok(index)
    }

    /// Opens the files `<fingerprint>.<i>.idx` in `dir`.
    pub fn open(dir: &Path, fingerprint: &Fingerprint) -> Result<Self> {
        let short = fingerprint.short();
        let mut partitions = Vec::new();
        let mut meta: Option<(usize, usize, usize, usize, f64)> = None;
        loop {
            let path = dir.join(format!("{short}.{}.idx", partitions.len()));
            if !path.exists() {
                break;
            }
            let mut file = File::open(&path)?;
            let mut header = [0u8; HEADER_LEN as usize];
            file.read_exact(&mut header).map_err(|e| corrupt(&path, &e.to_string()))?;
            let h = Header::parse(&header).map_err(|r| corrupt(&path, &r))?;
            if h.fingerprint != *fingerprint {
                return Err(RtcError::StaleIndex {
                    expected: fingerprint.to_string(),
                    found: h.fingerprint.to_string(),
                });
            }
            if h.member_index as usize != partitions.len() {
                return Err(corrupt(&path, "member index does not match file name"));
            }
            let this = (h.dimension, h.partitions, h.len, h.block_size, h.stride);
            match meta {
                None => meta = Some(this),
                Some(m) if m == this => {}
                Some(_) => return Err(corrupt(&path, "header disagrees with partition 0")),
            }
            let expected_len = HEADER_LEN + RECORD_LEN * h.len as u64;
            if file.metadata()?.len() != expected_len {
                return Err(corrupt(&path, "file length does not match header"));
            }
            partitions.push(Partition {
                swap_out_id: h.swap_out_id,
                store: Store::File {
                    path,
                    file: Mutex::new(file),
                },
            });
        }
        let (dimension, m, len, block_size, stride) = meta.ok_or_else(|| {
            RtcError::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("no index files {short}.*.idx in {}", dir.display()),
            ))
        })?;
        if m != partitions.len() {
            return Err(RtcError::CorruptIndex {
                path: dir.to_path_buf(),
                reason: format!("expected {m} partition files, found {}", partitions.len()),
            });
        }
        Ok(NnIndex {
            fingerprint: *fingerprint,
            dimension,
            len,
            block_size,
            stride,
            partitions,
            build_io: IoStats::default(),
            io: IoCounters::default(),
        })
    }

    pub fn partition_path(&self, dir: &Path, member: usize) -> PathBuf {
        dir.join(format!("{}.{member}.idx", self.fingerprint.short()))
    }

    fn header_bytes(&self, member: usize) -> [u8; HEADER_LEN as usize] {
        let mut h = [0u8; HEADER_LEN as usize];
        h[0..8].copy_from_slice(MAGIC);
        h[8..12].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        h[12..16].copy_from_slice(&(self.dimension as u32).to_le_bytes());
        h[16..20].copy_from_slice(&(self.partitions.len() as u32).to_le_bytes());
        h[20..24].copy_from_slice(&(member as u32).to_le_bytes());
        h[24..32].copy_from_slice(&(self.len as u64).to_le_bytes());
        h[32..40].copy_from_slice(&(self.block_size as u64).to_le_bytes());
        h[40..48].copy_from_slice(&self.partitions[member].swap_out_id.0.to_le_bytes());
        h[48..80].copy_from_slice(&self.fingerprint.0);
        h[80..88].copy_from_slice(&self.stride.to_le_bytes());
        h
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn check_fingerprint(&self, expected: &Fingerprint) -> Result<()> {
        if self.fingerprint == *expected {
            Ok(())
        } else {
            Err(RtcError::StaleIndex {
                expected: expected.to_string(),
                found: self.fingerprint.to_string(),
            })
        }
    }

    pub fn partitions(&self) -> usize {
        self.partitions.len()
    }

    /// Entries per partition (size of the object space).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks_per_partition(&self) -> usize {
        block_count(self.len, self.block_size)
    }

    pub fn swap_out_id(&self, member: usize) -> Result<ObjectId> {
        Ok(self.partition(member)?.swap_out_id)
    }

    /// iDistance-style single-axis key: `member * stride + key`.
    pub fn composite_key(&self, member: usize, key: f64) -> f64 {
        member as f64 * self.stride + key
    }

    pub fn stride(&self) -> f64 {
        self.stride
    }

    fn partition(&self, member: usize) -> Result<&Partition> {
        self.partitions.get(member).ok_or(RtcError::InvalidPartition {
            index: member,
            partitions: self.partitions.len(),
        })
    }

    /// Reads block `block` of partition `member`, counting one block read.
    pub fn read_block(&self, member: usize, block: usize) -> Result<Vec<IndexEntry>> {
        let part = self.partition(member)?;
        let start = block * self.block_size;
        if start >= self.len {
            return Err(RtcError::InvalidArgument(format!(
                "block {block} out of range ({} blocks)",
                self.blocks_per_partition()
            )));
        }
        let end = (start + self.block_size).min(self.len);
        let entries = match &part.store {
            Store::Memory(run) => run[start..end].to_vec(),
            Store::File { path, file } => {
                let mut buf = vec![0u8; (end - start) * RECORD_LEN as usize];
                {
                    let mut f = file.lock().unwrap_or_else(|e| e.into_inner());
                    f.seek(SeekFrom::Start(HEADER_LEN + start as u64 * RECORD_LEN))?;
                    f.read_exact(&mut buf).map_err(|e| corrupt(path, &e.to_string()))?;
                }
                buf.chunks_exact(RECORD_LEN as usize)
                    .map(|c| IndexEntry {
                        key: f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                        id: ObjectId(u64::from_le_bytes(c[8..16].try_into().expect("8 bytes"))),
                    })
                    .collect()
            }
        };
        self.io.add_read(1);
        Ok(entries)
    }

    pub fn cursor(&self, member: usize) -> Result<PartitionCursor<'_>> {
        self.partition(member)?;
        Ok(PartitionCursor {
            index: self,
            member,
            next_block: 0,
        })
    }

    /// The `k` smallest-key entries of partition `member`, reading
    /// `ceil(k / B)` blocks. `k > n` returns the whole partition.
    pub fn query_min(&self, member: usize, k: usize) -> Result<Vec<IndexEntry>> {
        if k == 0 {
            return Err(RtcError::InvalidArgument("k must be at least 1".into()));
        }
        let mut cursor = self.cursor(member)?;
        self.io.add_query();
        let mut out = Vec::with_capacity(k.min(self.len));
        while out.len() < k {
            match cursor.next_block()? {
                Some(block) => out.extend(block),
                None => break,
            }
        }
        out.truncate(k);
        Ok(out)
    }

    pub(crate) fn record_query(&self) {
        self.io.add_query();
    }

    /// Query-time I/O since construction or the last [`reset_io`](Self::reset_io).
    pub fn io(&self) -> IoStats {
        self.io.snapshot()
    }

    pub fn reset_io(&self) {
        self.io.reset();
    }

    /// I/O spent writing the index (zero for in-memory builds).
    pub fn build_io(&self) -> IoStats {
        self.build_io
    }
}

/// Sequential reader over one partition's blocks.
pub struct PartitionCursor<'a> {
    index: &'a NnIndex,
    member: usize,
    next_block: usize,
}

impl PartitionCursor<'_> {
    pub fn next_block(&mut self) -> Result<Option<Vec<IndexEntry>>> {
        if self.is_exhausted() {
            return Ok(None);
        }
        let block = self.index.read_block(self.member, self.next_block)?;
        self.next_block += 1;
        Ok(Some(block))
    }

    pub fn is_exhausted(&self) -> bool {
        self.next_block >= self.index.blocks_per_partition()
    }

    pub fn blocks_read(&self) -> usize {
        self.next_block
    }
}

struct Header {
    dimension: usize,
    partitions: usize,
    member_index: u32,
    len: usize,
    block_size: usize,
    swap_out_id: ObjectId,
    fingerprint: Fingerprint,
    stride: f64,
}

impl Header {
    fn parse(h: &[u8; HEADER_LEN as usize]) -> std::result::Result<Self, String> {
        let u32_at = |o: usize| u32::from_le_bytes(h[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(h[o..o + 8].try_into().expect("8 bytes"));
        if &h[0..8] != MAGIC {
            return Err("bad magic".into());
        }
        let version = u32_at(8);
        if version != FORMAT_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let block_size = u64_at(32) as usize;
        if block_size == 0 {
            return Err("block size is zero".into());
        }
        let mut fp = [0u8; 32];
        fp.copy_from_slice(&h[48..80]);
        Ok(Header {
            dimension: u32_at(12) as usize,
            partitions: u32_at(16) as usize,
            member_index: u32_at(20),
            len: u64_at(24) as usize,
            block_size,
            swap_out_id: ObjectId(u64_at(40)),
            fingerprint: Fingerprint(fp),
            stride: f64::from_le_bytes(h[80..88].try_into().expect("8 bytes")),
        })
    }
}

fn corrupt(path: &Path, reason: &str) -> RtcError {
    RtcError::CorruptIndex {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TargetContext, TeamContext, WeightVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(id: u64, lambda: f64, attrs: &[f64]) -> ObjectRecord {
        ObjectRecord::new(id, format!("o{id}"), lambda, attrs.to_vec()).unwrap()
    }

    struct Fixture {
        space: ObjectSpace,
        team: TeamContext,
        target: TargetContext,
        w: WeightVector,
    }

    impl Fixture {
        fn random(n: usize, m: usize, seed: u64) -> Self {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let records: Vec<_> = (0..n as u64)
                .map(|i| {
                    let a: Vec<f64> = (0..3).map(|_| rng.random_range(0..50) as f64).collect();
                    rec(i, rng.random_range(1.0..10.0), &a)
                })
                .collect();
            let space = ObjectSpace::new(vec!["a".into(), "b".into(), "c".into()], records).unwrap();
            let ids: Vec<ObjectId> = (0..m as u64).map(ObjectId).collect();
            let team = TeamContext::from_space(&space, &ids).unwrap();
            let target = TargetContext::new("T", vec![60.0, 40.0, 80.0]).unwrap();
            Fixture {
                space,
                team,
                target,
                w: WeightVector::new(vec![0.5, 1.0, 0.25]).unwrap(),
            }
        }

        fn problem(&self) -> Problem<'_> {
            Problem::new(&self.space, &self.team, &self.target, &self.w).unwrap()
        }
    }

    #[test]
    fn block_layout_arithmetic() {
        let f = Fixture::random(5, 2, 1);
        let idx = NnIndex::build(&f.problem(), 2).unwrap();
        assert_eq!(idx.partitions(), 2);
        assert_eq!(idx.blocks_per_partition(), 3);
        let sizes: Vec<usize> = (0..3).map(|b| idx.read_block(0, b).unwrap().len()).collect();
        assert_eq!(sizes, vec![2, 2, 1]);
    }

    #[test]
    fn build_errors() {
        let f = Fixture::random(5, 2, 1);
        assert!(matches!(NnIndex::build(&f.problem(), 0), Err(RtcError::InvalidArgument(_))));
        let empty = ObjectSpace::new(vec!["a".into(), "b".into(), "c".into()], vec![]).unwrap();
        let p = Problem::new(&empty, &f.team, &f.target, &f.w).unwrap();
        assert!(matches!(NnIndex::build(&p, 4), Err(RtcError::EmptySpace)));
    }

    #[test]
    fn runs_are_sorted_and_complete() {
        let f = Fixture::random(100, 3, 7);
        let idx = NnIndex::build(&f.problem(), 7).unwrap();
        for m in 0..3 {
            let all = idx.query_min(m, 100).unwrap();
            assert_eq!(all.len(), 100);
            assert!(all.windows(2).all(|w| (w[0].key, w[0].id) <= (w[1].key, w[1].id)));
            let mut ids: Vec<u64> = all.iter().map(|e| e.id.0).collect();
            ids.sort_unstable();
            assert_eq!(ids, (0..100).collect::<Vec<_>>());
        }
    }

    #[test]
    fn query_min_reads_ceil_k_over_b_blocks() {
        let f = Fixture::random(100, 2, 3);
        let idx = NnIndex::build(&f.problem(), 10).unwrap();
        for (k, blocks) in [(1, 1), (3, 1), (10, 1), (11, 2), (100, 10), (500, 10)] {
            idx.reset_io();
            let got = idx.query_min(1, k).unwrap();
            assert_eq!(got.len(), k.min(100));
            assert_eq!(idx.io().blocks_read, blocks, "k={k}");
            assert_eq!(idx.io().queries_served, 1);
        }
        assert!(matches!(idx.query_min(2, 1), Err(RtcError::InvalidPartition { index: 2, .. })));
        assert!(matches!(idx.query_min(0, 0), Err(RtcError::InvalidArgument(_))));
    }

    #[test]
    fn query_min_matches_linear_scan() {
        let f = Fixture::random(100, 2, 11);
        let p = f.problem();
        let idx = NnIndex::build(&p, 10).unwrap();
        let diff = p.diff().unwrap();
        let v = ranking::virtual_object_from_diff(&diff, &f.team.members()[0]).unwrap();
        let mut scan: Vec<(f64, u64)> = f
            .space
            .records()
            .iter()
            .map(|r| (ranking::odis_record(&v, r, f.w.values()), r.id.0))
            .collect();
        scan.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        idx.reset_io();
        let got: Vec<(f64, u64)> = idx.query_min(0, 3).unwrap().iter().map(|e| (e.key, e.id.0)).collect();
        assert_eq!(got, scan[..3].to_vec());
        assert_eq!(idx.io().blocks_read, 1);
    }

    #[test]
    fn scan_blocks_counts() {
        let f = Fixture::random(1, 1, 2);
        let io = IoCounters::default();
        assert_eq!(scan_blocks(&f.space, 10, &io).unwrap().count(), 1);
        assert_eq!(io.snapshot().blocks_read, 1);
        let f = Fixture::random(400, 1, 2);
        io.reset();
        assert_eq!(scan_blocks(&f.space, 100, &io).unwrap().count(), 4);
        assert_eq!(io.snapshot().blocks_read, 4);
        assert_eq!(block_count(1_070_000, 10), 107_000);
    }

    #[test]
    fn persisted_index_round_trips() {
        let f = Fixture::random(53, 3, 5);
        let p = f.problem();
        let dir = tempfile::tempdir().unwrap();
        let disk = NnIndex::build_to_dir(&p, 5, dir.path()).unwrap();
        let mem = NnIndex::build(&p, 5).unwrap();
        assert_eq!(disk.build_io().blocks_written, 3 * 11);
        for m in 0..3 {
            assert_eq!(disk.query_min(m, 53).unwrap(), mem.query_min(m, 53).unwrap());
            assert_eq!(disk.swap_out_id(m).unwrap(), mem.swap_out_id(m).unwrap());
        }
        let reopened = NnIndex::open(dir.path(), &p.fingerprint()).unwrap();
        assert_eq!(reopened.blocks_per_partition(), 11);
        assert_eq!(reopened.stride(), mem.stride());
    }

    #[test]
    fn rebuild_is_byte_identical() {
        let f = Fixture::random(40, 2, 9);
        let p = f.problem();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ia = NnIndex::build_to_dir(&p, 4, a.path()).unwrap();
        NnIndex::build_to_dir(&p, 4, b.path()).unwrap();
        for m in 0..2 {
            let pa = fs::read(ia.partition_path(a.path(), m)).unwrap();
            let pb = fs::read(ia.partition_path(b.path(), m)).unwrap();
            assert_eq!(pa, pb);
            assert_eq!(&pa[0..8], MAGIC);
            assert_eq!(pa.len() as u64, HEADER_LEN + 40 * RECORD_LEN);
        }
    }

    #[test]
    fn open_detects_corruption() {
        let f = Fixture::random(10, 1, 9);
        let p = f.problem();
        let dir = tempfile::tempdir().unwrap();
        let idx = NnIndex::build_to_dir(&p, 4, dir.path()).unwrap();
        let path = idx.partition_path(dir.path(), 0);
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 1);
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(NnIndex::open(dir.path(), &p.fingerprint()), Err(RtcError::CorruptIndex { .. })));
    }

    #[test]
    fn composite_keys_separate_partitions() {
        let f = Fixture::random(30, 3, 4);
        let idx = NnIndex::build(&f.problem(), 8).unwrap();
        let max_of_0 = idx.query_min(0, 30).unwrap().last().unwrap().key;
        let min_of_1 = idx.query_min(1, 1).unwrap()[0].key;
        assert!(idx.composite_key(0, max_of_0) < idx.composite_key(1, min_of_1));
    }
}
