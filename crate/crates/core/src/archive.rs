//! The `.splz` container.
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! header        62 bytes
//!   magic "SPLZ" | version u16 | vertex_count u32 | original_vertex_count u32
//!   | region_count u32 | len_to_dic u32 (0 = inf) | seed u64
//!   | region_table_offset u64 | dictionaries_offset u64
//!   | index_offset u64 | streams_offset u64
//! region table  region_count * (root u32, dictionary offset u64)
//!               then region_of u32 * vertex_count
//!               then dict_parent u32 * vertex_count (0xFFFFFFFF = region dictionary)
//! dictionaries  region_count * vertex_count raw last-move bytes
//! index         (vertex_count + 1) * u64 offsets into the streams section
//! streams       encoded token streams, in vertex order
//! ```
//!
//! Dictionary offsets are relative to the dictionaries section; index
//! offsets are relative to the streams section. Roots have empty records.

use std::borrow::Cow;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::codec::DictIndex;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::partition::{LenToDic, RegionPlan};
use crate::sssp;

pub const MAGIC: [u8; 4] = *b"SPLZ";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 62;
const NO_PARENT: u32 = u32::MAX;
const REGION_ENTRY_LEN: u64 = 12;

/// Build-time bound on how many materialized chain dictionaries keep their
/// match index alive at once.
const INDEX_CACHE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchiveHeader {
    pub version: u16,
    pub vertex_count: u32,
    pub original_vertex_count: u32,
    pub region_count: u32,
    pub len_to_dic: LenToDic,
    pub seed: u64,
    pub region_table_offset: u64,
    pub dictionaries_offset: u64,
    pub index_offset: u64,
    pub streams_offset: u64,
}

impl ArchiveHeader {
    fn layout(vertex_count: u32, original_vertex_count: u32, region_count: u32, len_to_dic: LenToDic, seed: u64) -> Self {
        let n = vertex_count as u64;
        let r = region_count as u64;
        let region_table_offset = HEADER_LEN;
        let dictionaries_offset = region_table_offset + r * REGION_ENTRY_LEN + 8 * n;
        let index_offset = dictionaries_offset + r * n;
        let streams_offset = index_offset + 8 * (n + 1);
        ArchiveHeader {
            version: VERSION,
            vertex_count,
            original_vertex_count,
            region_count,
            len_to_dic,
            seed,
            region_table_offset,
            dictionaries_offset,
            index_offset,
            streams_offset,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN as usize] {
        let mut b = [0u8; HEADER_LEN as usize];
        b[0..4].copy_from_slice(&MAGIC);
        b[4..6].copy_from_slice(&self.version.to_le_bytes());
        b[6..10].copy_from_slice(&self.vertex_count.to_le_bytes());
        b[10..14].copy_from_slice(&self.original_vertex_count.to_le_bytes());
        b[14..18].copy_from_slice(&self.region_count.to_le_bytes());
        b[18..22].copy_from_slice(&self.len_to_dic.to_raw().to_le_bytes());
        b[22..30].copy_from_slice(&self.seed.to_le_bytes());
        b[30..38].copy_from_slice(&self.region_table_offset.to_le_bytes());
        b[38..46].copy_from_slice(&self.dictionaries_offset.to_le_bytes());
        b[46..54].copy_from_slice(&self.index_offset.to_le_bytes());
        b[54..62].copy_from_slice(&self.streams_offset.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() < HEADER_LEN as usize {
            return Err(Error::Format("truncated header".into()));
        }
        if b[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u16_at = |i: usize| u16::from_le_bytes(b[i..i + 2].try_into().unwrap());
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        let version = u16_at(4);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        Ok(ArchiveHeader {
            version,
            vertex_count: u32_at(6),
            original_vertex_count: u32_at(10),
            region_count: u32_at(14),
            len_to_dic: LenToDic::from_raw(u32_at(18)),
            seed: u64_at(22),
            region_table_offset: u64_at(30),
            dictionaries_offset: u64_at(38),
            index_offset: u64_at(46),
            streams_offset: u64_at(54),
        })
    }
}

/// Byte accounting of one archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeBreakdown {
    pub header_bytes: u64,
    pub region_table_bytes: u64,
    pub dictionary_bytes: u64,
    pub index_bytes: u64,
    pub stream_bytes: u64,
    pub vertex_count: u64,
}

impl SizeBreakdown {
    fn new(header: &ArchiveHeader, stream_bytes: u64) -> Self {
        SizeBreakdown {
            header_bytes: HEADER_LEN,
            region_table_bytes: header.dictionaries_offset - header.region_table_offset,
            dictionary_bytes: header.index_offset - header.dictionaries_offset,
            index_bytes: header.streams_offset - header.index_offset,
            stream_bytes,
            vertex_count: header.vertex_count as u64,
        }
    }

    pub fn total(&self) -> u64 {
        self.header_bytes + self.region_table_bytes + self.dictionary_bytes + self.index_bytes + self.stream_bytes
    }

    /// One byte per (source, target) pair.
    pub fn raw_bytes(&self) -> u64 {
        self.vertex_count * self.vertex_count
    }

    pub fn ratio(&self) -> f64 {
        self.raw_bytes() as f64 / self.total() as f64
    }

    pub fn dictionary_proportion(&self) -> f64 {
        self.dictionary_bytes as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildReport {
    pub header: ArchiveHeader,
    pub sizes: SizeBreakdown,
}

struct RegionOutput {
    dictionary: Vec<u8>,
    records: Vec<(VertexId, Vec<u8>)>,
}

struct Frame {
    vertex: VertexId,
    spt: Vec<u8>,
    index: Option<DictIndex>,
}

/// Dictionary-chain forest of one region in depth-first order, with leaf
/// children ahead of their internal siblings so a parent's index is reused
/// for all its leaves at once.
fn region_order(plan: &RegionPlan, region: u32, members: &[VertexId], has_children: &mut [bool]) -> Vec<VertexId> {
    let root = plan.root_of[region as usize];
    let mut children: std::collections::HashMap<VertexId, Vec<VertexId>> = Default::default();
    for &v in members {
        if v == root {
            continue;
        }
        let key = plan.dict_parent[v as usize].unwrap_or(root);
        children.entry(key).or_default().push(v);
    }
    for &k in children.keys() {
        has_children[k as usize] = true;
    }
    for list in children.values_mut() {
        list.sort_by_key(|&v| (has_children[v as usize], v));
    }
    let mut order = Vec::with_capacity(members.len());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        if let Some(list) = children.get(&v) {
            stack.extend(list.iter().rev());
        }
    }
    order
}

fn build_region(graph: &Graph, plan: &RegionPlan, region: u32, members: &[VertexId]) -> Result<RegionOutput> {
    let root = plan.root_of[region as usize];
    let mut has_children = vec![false; graph.vertex_count()];
    let order = region_order(plan, region, members, &mut has_children);
    debug_assert_eq!(order.len(), members.len());

    let mut stack: Vec<Frame> = Vec::new();
    let mut dictionary = Vec::new();
    let mut records = Vec::with_capacity(members.len());
    sssp::apsp_sweep(graph, &order, 1, |spt| -> Result<()> {
        let v = spt.source;
        if v == root {
            dictionary = spt.last_move.clone();
            stack.push(Frame {
                vertex: v,
                index: Some(DictIndex::new(&spt.last_move)?),
                spt: spt.last_move,
            });
            return Ok(());
        }
        let key = plan.dict_parent[v as usize].unwrap_or(root);
        while stack.last().is_some_and(|f| f.vertex != key) {
            stack.pop();
        }
        let top = stack
            .last_mut()
            .ok_or_else(|| Error::PlanMismatch(format!("dictionary of {v} not yet built")))?;
        if top.index.is_none() {
            top.index = Some(DictIndex::new(&top.spt)?);
        }
        let mut bytes = Vec::new();
        top.index.as_ref().unwrap().compress_encoded(&spt.last_move, &mut bytes)?;
        records.push((v, bytes));
        if has_children[v as usize] {
            let len = stack.len();
            for f in stack.iter_mut().take(len.saturating_sub(INDEX_CACHE)) {
                f.index = None;
            }
            stack.push(Frame {
                vertex: v,
                spt: spt.last_move,
                index: None,
            });
        }
        Ok(())
    })?;
    Ok(RegionOutput { dictionary, records })
}

/// Computes every tree, compresses it along the plan's dictionary chains and
/// writes the archive to `sink`. Output is identical for any `threads`.
pub fn build_archive<W: Write>(graph: &Graph, plan: &RegionPlan, threads: usize, mut sink: W) -> Result<BuildReport> {
    plan.check(graph)?;
    let n = graph.vertex_count();
    if n == 0 {
        return Err(Error::PlanMismatch("graph has no vertices".into()));
    }
    let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); plan.region_count];
    for (v, &r) in plan.region_of.iter().enumerate() {
        members[r as usize].push(v as VertexId);
    }

    let threads = sssp::effective_threads(threads);
    let regions: Vec<Result<RegionOutput>> = if threads <= 1 {
        (0..plan.region_count)
            .map(|r| build_region(graph, plan, r as u32, &members[r]))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Io(io::Error::other(e)))?;
        pool.install(|| {
            (0..plan.region_count)
                .into_par_iter()
                .map(|r| build_region(graph, plan, r as u32, &members[r]))
                .collect()
        })
    };

    let mut dictionaries = Vec::with_capacity(plan.region_count);
    let mut records: Vec<Vec<u8>> = vec![Vec::new(); n];
    for region in regions {
        let region = region?;
        dictionaries.push(region.dictionary);
        for (v, bytes) in region.records {
            records[v as usize] = bytes;
        }
    }

    let header = ArchiveHeader::layout(
        n as u32,
        graph.original_vertex_count() as u32,
        plan.region_count as u32,
        plan.len_to_dic,
        plan.seed,
    );
    let mut w = io::BufWriter::new(&mut sink);
    w.write_all(&header.to_bytes())?;
    for (r, &root) in plan.root_of.iter().enumerate() {
        w.write_all(&root.to_le_bytes())?;
        w.write_all(&((r * n) as u64).to_le_bytes())?;
    }
    for &r in &plan.region_of {
        w.write_all(&r.to_le_bytes())?;
    }
    for p in &plan.dict_parent {
        w.write_all(&p.unwrap_or(NO_PARENT).to_le_bytes())?;
    }
    for d in &dictionaries {
        w.write_all(d)?;
    }
    let mut offset = 0u64;
    w.write_all(&offset.to_le_bytes())?;
    for r in &records {
        offset += r.len() as u64;
        w.write_all(&offset.to_le_bytes())?;
    }
    for r in &records {
        w.write_all(r)?;
    }
    w.flush()?;
    Ok(BuildReport {
        header,
        sizes: SizeBreakdown::new(&header, offset),
    })
}

/// Builds into memory.
pub fn build_archive_bytes(graph: &Graph, plan: &RegionPlan, threads: usize) -> Result<(Vec<u8>, BuildReport)> {
    let mut bytes = Vec::new();
    let report = build_archive(graph, plan, threads, &mut bytes)?;
    Ok((bytes, report))
}

/// Human-readable `key=value` sidecar mirroring the header.
pub fn write_meta<W: Write>(mut w: W, report: &BuildReport, extra: &[(&str, String)]) -> io::Result<()> {
    let h = &report.header;
    let s = &report.sizes;
    writeln!(w, "magic=SPLZ")?;
    writeln!(w, "version={}", h.version)?;
    writeln!(w, "vertex_count={}", h.vertex_count)?;
    writeln!(w, "original_vertex_count={}", h.original_vertex_count)?;
    writeln!(w, "region_count={}", h.region_count)?;
    writeln!(w, "len_to_dic={}", h.len_to_dic)?;
    writeln!(w, "seed={}", h.seed)?;
    writeln!(w, "region_table_offset={}", h.region_table_offset)?;
    writeln!(w, "dictionaries_offset={}", h.dictionaries_offset)?;
    writeln!(w, "index_offset={}", h.index_offset)?;
    writeln!(w, "streams_offset={}", h.streams_offset)?;
    writeln!(w, "region_table_bytes={}", s.region_table_bytes)?;
    writeln!(w, "dictionary_bytes={}", s.dictionary_bytes)?;
    writeln!(w, "index_bytes={}", s.index_bytes)?;
    writeln!(w, "stream_bytes={}", s.stream_bytes)?;
    writeln!(w, "total_bytes={}", s.total())?;
    writeln!(w, "raw_bytes={}", s.raw_bytes())?;
    writeln!(w, "compression_ratio={:.3}", s.ratio())?;
    for (k, v) in extra {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreMode {
    InMemory,
    FileBacked,
}

#[derive(Debug)]
enum Store {
    Memory(Vec<u8>),
    File { file: File, dictionaries: Vec<u8> },
}

#[cfg(unix)]
fn read_exact_at(file: &File, buf: &mut [u8], offset: u64) -> io::Result<()> {
    std::os::unix::fs::FileExt::read_exact_at(file, buf, offset)
}

#[cfg(windows)]
fn read_exact_at(file: &File, mut buf: &mut [u8], mut offset: u64) -> io::Result<()> {
    use std::os::windows::fs::FileExt;
    while !buf.is_empty() {
        match file.seek_read(buf, offset)? {
            0 => return Err(io::ErrorKind::UnexpectedEof.into()),
            n => {
                buf = &mut buf[n..];
                offset += n as u64;
            }
        }
    }
    Ok(())
}

/// A read of one vertex's record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record<'a> {
    /// The vertex is its region's root; its tree is the raw dictionary.
    Root { region: u32, dictionary: &'a [u8] },
    Compressed {
        region: u32,
        bytes: Cow<'a, [u8]>,
        /// `None` when compressed directly against the region dictionary.
        dict_parent: Option<VertexId>,
    },
}

/// Random-access reader. All lookups take `&self`; file-backed reads are
/// positioned, so one reader can serve many threads.
#[derive(Debug)]
pub struct ArchiveReader {
    header: ArchiveHeader,
    root_of: Vec<VertexId>,
    dict_offsets: Vec<u64>,
    region_of: Vec<u32>,
    dict_parent: Vec<u32>,
    depth: Vec<u32>,
    index: Vec<u64>,
    file_len: u64,
    store: Store,
}

fn le_u32s(b: &[u8]) -> Vec<u32> {
    b.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect()
}

fn le_u64s(b: &[u8]) -> Vec<u64> {
    b.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect()
}

impl ArchiveReader {
    pub fn open<P: AsRef<Path>>(path: P, mode: StoreMode) -> Result<Self> {
        let file = File::open(path)?;
        match mode {
            StoreMode::InMemory => Self::from_reader(file),
            StoreMode::FileBacked => Self::from_file(file),
        }
    }

    pub fn from_reader<R: Read>(mut reader: R) -> Result<Self> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        let file_len = bytes.len() as u64;
        let header = ArchiveHeader::from_bytes(&bytes)?;
        Self::check_offsets(&header, file_len)?;
        let table = &bytes[header.region_table_offset as usize..header.dictionaries_offset as usize];
        let index = &bytes[header.index_offset as usize..header.streams_offset as usize];
        let mut reader = Self::assemble(header, table, index, file_len, Store::Memory(Vec::new()))?;
        reader.store = Store::Memory(bytes);
        Ok(reader)
    }

    /// Loads header, tables, index and dictionaries; token streams stay on
    /// disk and are read per query.
    pub fn from_file(file: File) -> Result<Self> {
        let file_len = file.metadata()?.len();
        let mut head = [0u8; HEADER_LEN as usize];
        if file_len < HEADER_LEN {
            return Err(Error::Format("truncated header".into()));
        }
        read_exact_at(&file, &mut head, 0)?;
        let header = ArchiveHeader::from_bytes(&head)?;
        Self::check_offsets(&header, file_len)?;
        let read = |from: u64, to: u64| -> Result<Vec<u8>> {
            let mut buf = vec![0u8; (to - from) as usize];
            read_exact_at(&file, &mut buf, from)?;
            Ok(buf)
        };
        let table = read(header.region_table_offset, header.dictionaries_offset)?;
        let dictionaries = read(header.dictionaries_offset, header.index_offset)?;
        let index = read(header.index_offset, header.streams_offset)?;
        Self::assemble(header, &table, &index, file_len, Store::File { file, dictionaries })
    }

    fn check_offsets(h: &ArchiveHeader, file_len: u64) -> Result<()> {
        let n = h.vertex_count as u64;
        let r = h.region_count as u64;
        let ordered = HEADER_LEN <= h.region_table_offset
            && h.region_table_offset <= h.dictionaries_offset
            && h.dictionaries_offset <= h.index_offset
            && h.index_offset <= h.streams_offset
            && h.streams_offset <= file_len;
        if !ordered {
            return Err(Error::Format("section offsets out of order or past end of file".into()));
        }
        let sized = h.dictionaries_offset - h.region_table_offset == r * REGION_ENTRY_LEN + 8 * n
            && h.index_offset - h.dictionaries_offset == r * n
            && h.streams_offset - h.index_offset == 8 * (n + 1);
        if !sized {
            return Err(Error::Format("section sizes do not match header counts".into()));
        }
        if n == 0 || r == 0 || h.original_vertex_count as u64 > n {
            return Err(Error::Format("invalid vertex or region count".into()));
        }
        Ok(())
    }

    fn assemble(header: ArchiveHeader, table: &[u8], index: &[u8], file_len: u64, store: Store) -> Result<Self> {
        let n = header.vertex_count as usize;
        let r = header.region_count as usize;
        let (entries, rest) = table.split_at(r * REGION_ENTRY_LEN as usize);
        let (region_of, dict_parent) = rest.split_at(4 * n);
        let mut root_of = Vec::with_capacity(r);
        let mut dict_offsets = Vec::with_capacity(r);
        for e in entries.chunks_exact(REGION_ENTRY_LEN as usize) {
            root_of.push(u32::from_le_bytes(e[0..4].try_into().unwrap()));
            dict_offsets.push(u64::from_le_bytes(e[4..12].try_into().unwrap()));
        }
        let region_of = le_u32s(region_of);
        let dict_parent = le_u32s(dict_parent);
        let index = le_u64s(index);
        let bad = |m: String| Err(Error::Format(m));

        if region_of.iter().any(|&x| x as usize >= r) {
            return bad("region index out of range".into());
        }
        let dict_section = (r * n) as u64;
        for (i, (&root, &off)) in root_of.iter().zip(&dict_offsets).enumerate() {
            if root as usize >= n || region_of[root as usize] as usize != i {
                return bad(format!("root of region {i} is not a member"));
            }
            if off.checked_add(n as u64).is_none_or(|end| end > dict_section) {
                return bad(format!("dictionary of region {i} out of bounds"));
            }
        }
        if index[0] != 0 || index.windows(2).any(|w| w[0] > w[1]) {
            return bad("index offsets are not monotone".into());
        }
        for &root in &root_of {
            if index[root as usize] != index[root as usize + 1] {
                return bad(format!("root {root} has a non-empty record"));
            }
        }
        for (v, &p) in dict_parent.iter().enumerate() {
            if p != NO_PARENT && (p as usize >= n || region_of[p as usize] != region_of[v]) {
                return bad(format!("dictionary parent of {v} is invalid"));
            }
        }
        let depth = chain_depths(&dict_parent)?;

        Ok(ArchiveReader {
            header,
            root_of,
            dict_offsets,
            region_of,
            dict_parent,
            depth,
            index,
            file_len,
            store,
        })
    }

    pub fn header(&self) -> &ArchiveHeader {
        &self.header
    }

    pub fn vertex_count(&self) -> usize {
        self.header.vertex_count as usize
    }

    pub fn original_vertex_count(&self) -> usize {
        self.header.original_vertex_count as usize
    }

    pub fn region_count(&self) -> usize {
        self.header.region_count as usize
    }

    pub fn len_to_dic(&self) -> LenToDic {
        self.header.len_to_dic
    }

    pub fn stream_bytes(&self) -> u64 {
        *self.index.last().unwrap()
    }

    pub fn sizes(&self) -> SizeBreakdown {
        SizeBreakdown::new(&self.header, self.stream_bytes())
    }

    pub fn region_of(&self, v: VertexId) -> u32 {
        self.region_of[v as usize]
    }

    pub fn root_of(&self, region: u32) -> VertexId {
        self.root_of[region as usize]
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.root_of(self.region_of(v)) == v
    }

    pub fn dict_parent(&self, v: VertexId) -> Option<VertexId> {
        let p = self.dict_parent[v as usize];
        (p != NO_PARENT && !self.is_root(v)).then_some(p)
    }

    /// Compressed ancestors expanded before `v` itself.
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v as usize]
    }

    pub fn record_len(&self, v: VertexId) -> u64 {
        self.index[v as usize + 1] - self.index[v as usize]
    }

    pub fn dictionary(&self, region: u32) -> &[u8] {
        let n = self.vertex_count();
        let off = self.dict_offsets[region as usize] as usize;
        match &self.store {
            Store::Memory(bytes) => {
                let base = self.header.dictionaries_offset as usize + off;
                &bytes[base..base + n]
            }
            Store::File { dictionaries, .. } => &dictionaries[off..off + n],
        }
    }

    pub fn check_vertex(&self, v: u64) -> Result<VertexId> {
        if v < self.vertex_count() as u64 {
            Ok(v as VertexId)
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    fn extent(&self, v: VertexId) -> Result<(u64, u64)> {
        let start = self.header.streams_offset + self.index[v as usize];
        let end = self.header.streams_offset + self.index[v as usize + 1];
        if end > self.file_len {
            return Err(Error::Format(format!(
                "record of vertex {v} extends past end of archive ({end} > {})",
                self.file_len
            )));
        }
        Ok((start, end))
    }

    /// Encoded bytes of `v`'s record, borrowed in memory mode or read into
    /// `scratch` in file-backed mode.
    pub fn stream_bytes_of<'a>(&'a self, v: VertexId, scratch: &'a mut Vec<u8>) -> Result<&'a [u8]> {
        let (start, end) = self.extent(v)?;
        match &self.store {
            Store::Memory(bytes) => Ok(&bytes[start as usize..end as usize]),
            Store::File { file, .. } => {
                scratch.resize((end - start) as usize, 0);
                read_exact_at(file, scratch, start)?;
                Ok(scratch)
            }
        }
    }

    pub fn read_record(&self, v: VertexId) -> Result<Record<'_>> {
        let v = self.check_vertex(v as u64)?;
        let region = self.region_of(v);
        if self.is_root(v) {
            return Ok(Record::Root {
                region,
                dictionary: self.dictionary(region),
            });
        }
        let mut scratch = Vec::new();
        let bytes = match &self.store {
            Store::Memory(_) => {
                let (start, end) = self.extent(v)?;
                let Store::Memory(b) = &self.store else { unreachable!() };
                Cow::Borrowed(&b[start as usize..end as usize])
            }
            Store::File { .. } => {
                self.stream_bytes_of(v, &mut scratch)?;
                Cow::Owned(scratch)
            }
        };
        Ok(Record::Compressed {
            region,
            bytes,
            dict_parent: self.dict_parent(v),
        })
    }
}

fn chain_depths(dict_parent: &[u32]) -> Result<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let n = dict_parent.len();
    let mut depth = vec![UNSET; n];
    let mut path = Vec::new();
    for v in 0..n {
        let mut cur = v;
        while depth[cur] == UNSET {
            if dict_parent[cur] == NO_PARENT {
                depth[cur] = 0;
                break;
            }
            path.push(cur);
            if path.len() > n {
                return Err(Error::Format("dictionary chain contains a cycle".into()));
            }
            cur = dict_parent[cur] as usize;
        }
        while let Some(u) = path.pop() {
            depth[u] = depth[dict_parent[u] as usize] + 1;
        }
    }
    Ok(depth)
}
