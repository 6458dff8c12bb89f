//! Minimal PLY support: the `vertex` element's `x`, `y`, `z` properties in
//! ASCII or binary little-endian files. Other properties and elements are
//! skipped.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use super::IoError;
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn decode_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, kind: Scalar },
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    body_start: usize,
}

fn header_err(offset: usize, message: impl Into<String>) -> IoError {
    IoError::PlyHeader {
        offset,
        message: message.into(),
    }
}

fn body_err(offset: usize, message: impl Into<String>) -> IoError {
    IoError::PlyBody {
        offset,
        message: message.into(),
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header, IoError> {
    let mut offset = 0;
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut first = true;
    loop {
        let Some(len) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            return Err(header_err(offset, "missing end_header"));
        };
        let raw = &bytes[offset..offset + len];
        let line = std::str::from_utf8(raw)
            .map_err(|_| header_err(offset, "header is not valid text"))?
            .trim_end_matches('\r')
            .trim();
        let line_start = offset;
        offset += len + 1;

        if first {
            if line != "ply" {
                return Err(header_err(0, "missing `ply` magic"));
            }
            first = false;
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", encoding, _version] => {
                format = Some(match *encoding {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    other => return Err(IoError::UnsupportedEncoding(other.to_string())),
                });
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| header_err(line_start, format!("bad element count `{count}`")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, _name] => {
                let kind = |s: &str| {
                    Scalar::parse(s)
                        .ok_or_else(|| header_err(line_start, format!("unknown type `{s}`")))
                };
                let property = Property::List {
                    count: kind(count)?,
                    item: kind(item)?,
                };
                elements
                    .last_mut()
                    .ok_or_else(|| header_err(line_start, "property before any element"))?
                    .properties
                    .push(property);
            }
            ["property", kind, name] => {
                let kind = Scalar::parse(kind)
                    .ok_or_else(|| header_err(line_start, format!("unknown type `{kind}`")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| header_err(line_start, "property before any element"))?
                    .properties
                    .push(Property::Scalar {
                        name: name.to_string(),
                        kind,
                    });
            }
            ["end_header"] => break,
            _ => return Err(header_err(line_start, format!("unrecognized line `{line}`"))),
        }
    }
    let format = format.ok_or_else(|| header_err(offset, "missing format line"))?;
    Ok(Header {
        format,
        elements,
        body_start: offset,
    })
}

/// Positions of x, y, z among an element's properties.
fn xyz_slots(element: &Element) -> Option<[usize; 3]> {
    let find = |axis: &str| {
        element
            .properties
            .iter()
            .position(|p| matches!(p, Property::Scalar { name, .. } if name == axis))
    };
    Some([find("x")?, find("y")?, find("z")?])
}

/// Whitespace-separated tokens with their byte offsets.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .map(|s| (start, s))
    }

    fn number(&mut self) -> Result<f64, IoError> {
        let (offset, tok) = self
            .next()
            .ok_or_else(|| body_err(self.pos, "truncated body: expected more values"))?;
        tok.parse()
            .map_err(|_| body_err(offset, format!("`{tok}` is not a number")))
    }
}

fn read_ascii(bytes: &[u8], header: &Header) -> Result<Vec<Point3>, IoError> {
    let mut tokens = Tokens {
        bytes,
        pos: header.body_start,
    };
    let mut points = Vec::new();
    for element in &header.elements {
        let slots = (element.name == "vertex").then(|| xyz_slots(element)).flatten();
        let mut values = vec![0.0; element.properties.len()];
        for _ in 0..element.count {
            for (k, property) in element.properties.iter().enumerate() {
                match property {
                    Property::Scalar { .. } => values[k] = tokens.number()?,
                    Property::List { .. } => {
                        let at = tokens.pos;
                        let n = tokens.number()?;
                        if n < 0.0 || n.fract() != 0.0 {
                            return Err(body_err(at, format!("bad list length {n}")));
                        }
                        for _ in 0..n as usize {
                            tokens.number()?;
                        }
                    }
                }
            }
            if let Some([x, y, z]) = slots {
                points.push(Vector3::new(values[x], values[y], values[z]));
            }
        }
    }
    Ok(points)
}

fn read_binary(bytes: &[u8], header: &Header) -> Result<Vec<Point3>, IoError> {
    let mut pos = header.body_start;
    let mut take = |n: usize| -> Result<&[u8], IoError> {
        if pos + n > bytes.len() {
            return Err(body_err(
                pos,
                format!("truncated body: need {n} bytes, {} left", bytes.len() - pos),
            ));
        }
        let slice = &bytes[pos..pos + n];
        pos += n;
        Ok(slice)
    };
    let mut points = Vec::new();
    for element in &header.elements {
        let slots = (element.name == "vertex").then(|| xyz_slots(element)).flatten();
        let mut values = vec![0.0; element.properties.len()];
        for _ in 0..element.count {
            for (k, property) in element.properties.iter().enumerate() {
                match property {
                    Property::Scalar { kind, .. } => {
                        values[k] = kind.decode_le(take(kind.size())?);
                    }
                    Property::List { count, item } => {
                        let n = count.decode_le(take(count.size())?);
                        take(n.max(0.0) as usize * item.size())?;
                    }
                }
            }
            if let Some([x, y, z]) = slots {
                points.push(Vector3::new(values[x], values[y], values[z]));
            }
        }
    }
    Ok(points)
}

/// Parses PLY bytes and returns the vertex positions in file order.
pub fn parse_ply(bytes: &[u8]) -> Result<Vec<Point3>, IoError> {
    let header = parse_header(bytes)?;
    let vertex = header
        .elements
        .iter()
        .find(|e| e.name == "vertex")
        .ok_or_else(|| header_err(0, "no vertex element"))?;
    if xyz_slots(vertex).is_none() {
        return Err(header_err(0, "vertex element lacks x, y or z"));
    }
    match header.format {
        PlyFormat::Ascii => read_ascii(bytes, &header),
        PlyFormat::BinaryLittleEndian => read_binary(bytes, &header),
    }
}

pub fn load_point_cloud(path: &Path) -> Result<Vec<Point3>, IoError> {
    let bytes = fs::read(path).map_err(|e| IoError::file(path, e))?;
    parse_ply(&bytes)
}

/// Writes vertices as `double` x, y, z.
pub fn write_ply(out: &mut impl Write, points: &[Point3], format: PlyFormat) -> std::io::Result<()> {
    let encoding = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        out,
        "ply\nformat {encoding} 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nend_header\n",
        points.len()
    )?;
    for p in points {
        match format {
            PlyFormat::Ascii => writeln!(out, "{} {} {}", p.x, p.y, p.z)?,
            PlyFormat::BinaryLittleEndian => {
                for v in [p.x, p.y, p.z] {
                    out.write_all(&v.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

pub fn save_point_cloud(path: &Path, points: &[Point3], format: PlyFormat) -> Result<(), IoError> {
    let mut buf = Vec::new();
    write_ply(&mut buf, points, format).map_err(|e| IoError::file(path, e))?;
    fs::write(path, buf).map_err(|e| IoError::file(path, e))
}
