//! 8-bit grayscale image files: binary PGM (P5) and PNG.
//!
//! Saving rounds and clamps to [0, 255]. Writes go to a sibling temporary
//! file that is renamed into place, so a failed save leaves no output.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rrc_core::ImageBuffer;

#[derive(Debug, thiserror::Error)]
pub enum ImageIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed PGM header: {reason}")]
    PgmHeader { path: String, reason: String },
    #[error("{path}: PGM maxval {maxval} unsupported (only 255)")]
    PgmMaxval { path: String, maxval: u32 },
    #[error("{path}: truncated pixel data ({found} of {expected} bytes)")]
    Truncated { path: String, expected: usize, found: usize },
    #[error("{path}: PNG decode failed: {reason}")]
    Png { path: String, reason: String },
    #[error("{path}: unsupported PNG layout {color:?}/{depth:?} (need 8-bit grayscale)")]
    PngLayout {
        path: String,
        color: png::ColorType,
        depth: png::BitDepth,
    },
    #[error("{path}: unrecognized image format")]
    UnknownFormat { path: String },
}

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Loads an 8-bit grayscale PGM (P5) or PNG, picked by content.
pub fn load_image(path: &Path) -> Result<ImageBuffer, ImageIoError> {
    let bytes = fs::read(path).map_err(|source| ImageIoError::Io {
        path: display(path),
        source,
    })?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes, path)
    } else if bytes.starts_with(&PNG_MAGIC) {
        decode_png(&bytes, path)
    } else {
        Err(ImageIoError::UnknownFormat { path: display(path) })
    }
}

fn decode_pgm(bytes: &[u8], path: &Path) -> Result<ImageBuffer, ImageIoError> {
    let header_err = |reason: &str| ImageIoError::PgmHeader {
        path: display(path),
        reason: reason.to_owned(),
    };
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(header_err("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(header_err("expected a decimal field"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| header_err("numeric field out of range"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(header_err("missing separator after maxval")),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(ImageIoError::PgmMaxval {
            path: display(path),
            maxval,
        });
    }
    if width == 0 || height == 0 {
        return Err(header_err("zero dimension"));
    }
    let expected = width as usize * height as usize;
    let pixels = &bytes[pos..];
    if pixels.len() < expected {
        return Err(ImageIoError::Truncated {
            path: display(path),
            expected,
            found: pixels.len(),
        });
    }
    Ok(to_buffer(height as usize, width as usize, &pixels[..expected]))
}

fn decode_png(bytes: &[u8], path: &Path) -> Result<ImageBuffer, ImageIoError> {
    let png_err = |e: png::DecodingError| ImageIoError::Png {
        path: display(path),
        reason: e.to_string(),
    };
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let info = reader.info();
    let (color, depth) = (info.color_type, info.bit_depth);
    if color != png::ColorType::Grayscale || depth != png::BitDepth::Eight {
        return Err(ImageIoError::PngLayout {
            path: display(path),
            color,
            depth,
        });
    }
    let mut buf = vec![0; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let stride = frame.line_size;
    let mut data = Vec::with_capacity(w * h);
    for row in buf[..h * stride].chunks(stride) {
        data.extend_from_slice(&row[..w]);
    }
    Ok(to_buffer(h, w, &data))
}

fn to_buffer(rows: usize, cols: usize, pixels: &[u8]) -> ImageBuffer {
    ImageBuffer::from_fn(rows, cols, |r, c| f64::from(pixels[r * cols + c]))
}

/// Round-and-clamp quantization to 8 bits.
pub fn to_bytes(img: &ImageBuffer) -> Vec<u8> {
    img.as_slice().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect()
}

/// Saves as PGM when the extension is `pgm`, PNG otherwise.
pub fn save_image(img: &ImageBuffer, path: &Path) -> Result<(), ImageIoError> {
    let bytes = to_bytes(img);
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let mut encoded = Vec::new();
    if is_pgm {
        write!(encoded, "P5\n{} {}\n255\n", img.cols(), img.rows()).expect("in-memory write");
        encoded.extend_from_slice(&bytes);
    } else {
        let mut enc = png::Encoder::new(&mut encoded, img.cols() as u32, img.rows() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| ImageIoError::Png {
            path: display(path),
            reason: e.to_string(),
        })?;
        w.write_image_data(&bytes).map_err(|e| ImageIoError::Png {
            path: display(path),
            reason: e.to_string(),
        })?;
        w.finish().map_err(|e| ImageIoError::Png {
            path: display(path),
            reason: e.to_string(),
        })?;
    }
    write_atomic(path, &encoded).map_err(|source| ImageIoError::Io {
        path: display(path),
        source,
    })
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        w.write_all(contents)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
