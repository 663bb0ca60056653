//! Binary containers, all little-endian.
//!
//! `TFF1` holds float planes over the lifted grid:
//!
//! ```text
//! "TFF1" | u32 width | u32 height | u32 n_theta | u32 plane count
//!        | per plane: u32 depth (1 or n_theta), width*height*depth f32
//! ```
//!
//! Feature fields store four planes: `ζ`, `ρ` (depth 1), `ψ_os` and `𝔈`
//! (depth `n_theta`).
//!
//! `TGR1` holds a priced trajectory graph:
//!
//! ```text
//! "TGR1" | u32 version | 32-byte cache key
//!        | u32 nodes | per node: u32 len, len * (i32 x, i32 y)
//!        | u32 edges | per edge: u32 a, u32 b, f64 weight, u32 from, u32 to,
//!                                u8 has_distance, f64 distance,
//!                                u32 n, n * (i32 x, i32 y, u32 bin),
//!                                u32 m, m * (f64 x, f64 y, f64 theta)
//! ```

use tubetrack_core::features::TubularFeatures;
use tubetrack_core::geodesic::{GeodesicPath, LiftedPoint, MarchResult, PathSample};
use tubetrack_core::graph::{Edge, EdgeBridge, TrajectoryGraph};
use tubetrack_core::Pixel;

use crate::error::{Error, Result};

pub const FIELD_MAGIC: &[u8; 4] = b"TFF1";
pub const GRAPH_MAGIC: &[u8; 4] = b"TGR1";
pub const GRAPH_VERSION: u32 = 1;

/// A set of float planes sharing one lifted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub width: usize,
    pub height: usize,
    pub n_theta: usize,
    /// `(depth, values)` with `values.len() == width * height * depth`.
    pub planes: Vec<(usize, Vec<f32>)>,
}

impl FieldFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let total: usize = self.planes.iter().map(|(_, v)| 4 + 4 * v.len()).sum();
        let mut w = Writer(Vec::with_capacity(20 + total));
        w.bytes(FIELD_MAGIC);
        w.u32(self.width as u32);
        w.u32(self.height as u32);
        w.u32(self.n_theta as u32);
        w.u32(self.planes.len() as u32);
        for (depth, values) in &self.planes {
            w.u32(*depth as u32);
            for v in values {
                w.bytes(&v.to_le_bytes());
            }
        }
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "TFF1");
        if r.take(4)? != FIELD_MAGIC {
            return Err(r.err("bad magic"));
        }
        let width = r.u32()? as usize;
        let height = r.u32()? as usize;
        let n_theta = r.u32()? as usize;
        let count = r.u32()? as usize;
        let mut planes = Vec::with_capacity(count.min(16));
        for _ in 0..count {
            let depth = r.u32()? as usize;
            if depth != 1 && depth != n_theta {
                return Err(r.err(format!("plane depth {depth} is neither 1 nor {n_theta}")));
            }
            let n = width
                .checked_mul(height)
                .and_then(|v| v.checked_mul(depth))
                .ok_or_else(|| r.err("dimensions overflow"))?;
            let raw = r.take(n.checked_mul(4).ok_or_else(|| r.err("dimensions overflow"))?)?;
            let values = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            planes.push((depth, values));
        }
        r.finish()?;
        Ok(FieldFile {
            width,
            height,
            n_theta,
            planes,
        })
    }

    pub fn from_features(f: &TubularFeatures) -> Self {
        FieldFile {
            width: f.width(),
            height: f.height(),
            n_theta: f.n_theta(),
            planes: vec![
                (1, f.zeta().to_vec()),
                (1, f.rho().to_vec()),
                (f.n_theta(), f.psi().to_vec()),
                (f.n_theta(), f.cost().to_vec()),
            ],
        }
    }

    pub fn into_features(self) -> Result<TubularFeatures> {
        let shape: Vec<usize> = self.planes.iter().map(|(d, _)| *d).collect();
        if shape != [1, 1, self.n_theta, self.n_theta] {
            return Err(Error::corrupt("TFF1", format!("plane layout {shape:?} is not a feature field")));
        }
        let mut it = self.planes.into_iter().map(|(_, v)| v);
        let (zeta, rho, psi, cost) = (
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        );
        TubularFeatures::from_parts(self.width, self.height, self.n_theta, zeta, rho, psi, cost)
            .map_err(|e| Error::corrupt("TFF1", e.to_string()))
    }

    /// `U` and `E` of a marching run; unreached points are `+inf`.
    pub fn from_march(m: &MarchResult) -> Self {
        let g = *m.grid();
        let mut u = vec![f32::INFINITY; g.len()];
        let mut e = vec![f32::INFINITY; g.len()];
        for p in m.accepted() {
            let i = g.index(p);
            u[i] = m.u(p) as f32;
            e[i] = m.e(p) as f32;
        }
        FieldFile {
            width: g.width(),
            height: g.height(),
            n_theta: g.n_theta(),
            planes: vec![(g.n_theta(), u), (g.n_theta(), e)],
        }
    }
}

pub fn graph_to_bytes(graph: &TrajectoryGraph, key: &[u8; 32]) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.bytes(GRAPH_MAGIC);
    w.u32(GRAPH_VERSION);
    w.bytes(key);
    w.u32(graph.node_count() as u32);
    for node in graph.nodes() {
        w.u32(node.len() as u32);
        for p in node {
            w.i32(p.x);
            w.i32(p.y);
        }
    }
    w.u32(graph.edges().len() as u32);
    for e in graph.edges() {
        w.u32(e.a as u32);
        w.u32(e.b as u32);
        w.f64(e.weight);
        w.u32(e.bridge.from as u32);
        w.u32(e.bridge.to as u32);
        w.0.push(e.bridge.distance.is_some() as u8);
        w.f64(e.bridge.distance.unwrap_or(0.0));
        let path = &e.bridge.path;
        w.u32(path.nodes.len() as u32);
        for n in &path.nodes {
            w.i32(n.x);
            w.i32(n.y);
            w.u32(n.bin as u32);
        }
        w.u32(path.samples.len() as u32);
        for s in &path.samples {
            w.f64(s.x);
            w.f64(s.y);
            w.f64(s.theta);
        }
    }
    w.0
}

/// Parses a graph and returns it with the key it was stored under.
pub fn graph_from_bytes(bytes: &[u8]) -> Result<(TrajectoryGraph, [u8; 32])> {
    let mut r = Reader::new(bytes, "TGR1");
    if r.take(4)? != GRAPH_MAGIC {
        return Err(r.err("bad magic"));
    }
    let version = r.u32()?;
    if version != GRAPH_VERSION {
        return Err(r.err(format!("unsupported version {version}")));
    }
    let key: [u8; 32] = r.take(32)?.try_into().unwrap();
    let n_nodes = r.u32()? as usize;
    let mut nodes = Vec::with_capacity(n_nodes.min(1 << 16));
    for _ in 0..n_nodes {
        let len = r.count(8)?;
        let mut pts = Vec::with_capacity(len);
        for _ in 0..len {
            pts.push(Pixel::new(r.i32()?, r.i32()?));
        }
        nodes.push(pts);
    }
    let n_edges = r.u32()? as usize;
    let mut edges = Vec::with_capacity(n_edges.min(1 << 16));
    for _ in 0..n_edges {
        let a = r.u32()? as usize;
        let b = r.u32()? as usize;
        let weight = r.f64()?;
        let from = r.u32()? as usize;
        let to = r.u32()? as usize;
        let has = r.take(1)?[0];
        let d = r.f64()?;
        let n = r.count(12)?;
        let mut lifted = Vec::with_capacity(n);
        for _ in 0..n {
            lifted.push(LiftedPoint::new(r.i32()?, r.i32()?, r.u32()? as usize));
        }
        let m = r.count(24)?;
        let mut samples = Vec::with_capacity(m);
        for _ in 0..m {
            samples.push(PathSample {
                x: r.f64()?,
                y: r.f64()?,
                theta: r.f64()?,
            });
        }
        edges.push(Edge {
            a,
            b,
            weight,
            bridge: EdgeBridge {
                from,
                to,
                distance: (has != 0).then_some(d),
                path: GeodesicPath {
                    nodes: lifted,
                    samples,
                },
            },
        });
    }
    r.finish()?;
    let expected = edges.len();
    let graph = TrajectoryGraph::new(nodes, edges).map_err(|e| Error::corrupt("TGR1", e.to_string()))?;
    if graph.edges().len() != expected {
        return Err(Error::corrupt("TGR1", "duplicate edges"));
    }
    Ok((graph, key))
}

struct Writer(Vec<u8>);

impl Writer {
    fn bytes(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }
    fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.bytes(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    kind: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], kind: &'static str) -> Self {
        Reader { buf, pos: 0, kind }
    }

    fn err(&self, detail: impl Into<String>) -> Error {
        Error::corrupt(self.kind, format!("{} (at byte {})", detail.into(), self.pos))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated, wanted {n} more bytes")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    /// Reads an element count and checks the remaining bytes can hold it.
    fn count(&mut self, elem: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(elem) > self.buf.len() - self.pos {
            return Err(self.err(format!("count {n} exceeds the remaining data")));
        }
        Ok(n)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(self.err("trailing bytes"));
        }
        Ok(())
    }
}
