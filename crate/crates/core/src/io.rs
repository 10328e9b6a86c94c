//! Raster I/O: PNG (8/16-bit, sRGB or linear) and PFM (32-bit float).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use crate::error::{Error, Result};
use crate::image::RadianceImage;

/// Encoding applied to PNG samples. PFM is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transfer {
    #[default]
    Srgb,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitDepth {
    Eight,
    #[default]
    Sixteen,
}

/// sRGB electro-optical transfer function (encoded value to linear).
pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// Inverse sRGB transfer (linear to encoded value).
pub fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.003_130_8 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

fn is_pfm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pfm"))
}

/// Loads an RGB PNG or PFM as linear radiance.
pub fn load_image(path: &Path, transfer: Transfer) -> Result<RadianceImage> {
    if is_pfm(path) {
        let raster = read_pfm(path)?;
        if raster.channels != 3 {
            return Err(Error::ChannelCount {
                path: path.into(),
                channels: raster.channels,
            });
        }
        return raster_to_image(path, raster);
    }
    let decoded = decode_png(path)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let decode = |v: f64| match transfer {
        Transfer::Srgb => srgb_to_linear(v),
        Transfer::Linear => v,
    };
    let interleaved: Vec<f64> = match decoded {
        DynamicImage::ImageRgb8(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| decode(v as f64 / 255.0))
            .collect(),
        DynamicImage::ImageRgb16(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| decode(v as f64 / 65535.0))
            .collect(),
        other => {
            return Err(channel_error(path, &other));
        }
    };
    let mut planes = [vec![0.0; w * h], vec![0.0; w * h], vec![0.0; w * h]];
    for (i, px) in interleaved.chunks_exact(3).enumerate() {
        for c in 0..3 {
            planes[c][i] = px[c];
        }
    }
    RadianceImage::from_planes(w, h, planes)
}

fn decode_png(path: &Path) -> Result<DynamicImage> {
    let reader = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    reader.decode().map_err(|e| match e {
        image::ImageError::IoError(e) => Error::io(path, e),
        other => Error::format(path, other.to_string()),
    })
}

fn channel_error(path: &Path, img: &DynamicImage) -> Error {
    let color = img.color();
    let bits = color.bits_per_pixel() / color.channel_count() as u16;
    if bits != 8 && bits != 16 {
        Error::UnsupportedBitDepth {
            path: path.into(),
            bits,
        }
    } else {
        Error::ChannelCount {
            path: path.into(),
            channels: color.channel_count() as usize,
        }
    }
}

/// Saves an image; PNG samples are clipped to `[0, 1]` before encoding.
pub fn save_image(
    img: &RadianceImage,
    path: &Path,
    transfer: Transfer,
    depth: BitDepth,
) -> Result<()> {
    if is_pfm(path) {
        let raster = ScalarRaster {
            width: img.width(),
            height: img.height(),
            channels: 3,
            data: interleave(img),
        };
        return write_pfm(path, &raster);
    }
    let encode = |v: f64| {
        let v = v.clamp(0.0, 1.0);
        match transfer {
            Transfer::Srgb => linear_to_srgb(v),
            Transfer::Linear => v,
        }
    };
    let (w, h) = (img.width() as u32, img.height() as u32);
    let samples = interleave(img);
    let result = match depth {
        BitDepth::Eight => {
            let raw: Vec<u8> = samples
                .iter()
                .map(|&v| (encode(v) * 255.0).round() as u8)
                .collect();
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw)
                .expect("buffer length matches dimensions")
                .save_with_format(path, image::ImageFormat::Png)
        }
        BitDepth::Sixteen => {
            let raw: Vec<u16> = samples
                .iter()
                .map(|&v| (encode(v) * 65535.0).round() as u16)
                .collect();
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, raw)
                .expect("buffer length matches dimensions")
                .save_with_format(path, image::ImageFormat::Png)
        }
    };
    result.map_err(|e| match e {
        image::ImageError::IoError(e) => Error::io(path, e),
        other => Error::format(path, other.to_string()),
    })
}

fn interleave(img: &RadianceImage) -> Vec<f64> {
    let n = img.width() * img.height();
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        out.extend_from_slice(&[r[i], g[i], b[i]]);
    }
    out
}

/// Row-major interleaved raster of 1 or 3 channels, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRaster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

fn raster_to_image(path: &Path, raster: ScalarRaster) -> Result<RadianceImage> {
    let n = raster.width * raster.height;
    let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, px) in raster.data.chunks_exact(3).enumerate() {
        for c in 0..3 {
            planes[c][i] = px[c];
        }
    }
    RadianceImage::from_planes(raster.width, raster.height, planes)
        .map_err(|e| Error::format(path, e.to_string()))
}

fn read_token<R: BufRead>(reader: &mut R, path: &Path) -> Result<String> {
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        let n = reader.read(&mut byte).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        if byte[0].is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            break;
        }
        token.push(byte[0]);
    }
    if token.is_empty() {
        return Err(Error::format(path, "truncated PFM header"));
    }
    String::from_utf8(token).map_err(|_| Error::format(path, "PFM header is not ASCII"))
}

/// Reads a PFM file (`PF` color or `Pf` grayscale). Negative scale means little-endian.
pub fn read_pfm(path: &Path) -> Result<ScalarRaster> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let magic = read_token(&mut reader, path)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(Error::format(path, format!("not a PFM file (magic {other:?})"))),
    };
    let parse = |s: String, what: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| Error::format(path, format!("bad PFM {what}: {s:?}")))
    };
    let width = parse(read_token(&mut reader, path)?, "width")? as usize;
    let height = parse(read_token(&mut reader, path)?, "height")? as usize;
    let scale = parse(read_token(&mut reader, path)?, "scale")?;
    if width == 0 || height == 0 || scale == 0.0 {
        return Err(Error::format(path, "PFM dimensions and scale must be nonzero"));
    }
    let little = scale < 0.0;
    let count = width * height * channels;
    let mut bytes = vec![0u8; 4 * count];
    reader
        .read_exact(&mut bytes)
        .map_err(|e| Error::format(path, format!("truncated PFM data: {e}")))?;
    let mut data = vec![0.0; count];
    let row_len = width * channels;
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        // PFM stores the bottom row first.
        let file_row = i / row_len;
        let dest = (height - 1 - file_row) * row_len + i % row_len;
        data[dest] = v as f64;
    }
    Ok(ScalarRaster {
        width,
        height,
        channels,
        data,
    })
}

/// Writes a little-endian PFM file.
pub fn write_pfm(path: &Path, raster: &ScalarRaster) -> Result<()> {
    let magic = match raster.channels {
        3 => "PF",
        1 => "Pf",
        n => return Err(Error::param(format!("PFM supports 1 or 3 channels, not {n}"))),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let row_len = raster.width * raster.channels;
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        write!(out, "{magic}\n{} {}\n-1.0\n", raster.width, raster.height)?;
        for row in (0..raster.height).rev() {
            for v in &raster.data[row * row_len..(row + 1) * row_len] {
                out.write_all(&(*v as f32).to_le_bytes())?;
            }
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Loads a single-channel raster: grayscale PFM, or 8/16-bit grayscale PNG as raw code values.
pub fn load_scalar(path: &Path) -> Result<ScalarRaster> {
    if is_pfm(path) {
        let raster = read_pfm(path)?;
        if raster.channels != 1 {
            return Err(Error::format(path, "expected a grayscale (Pf) PFM"));
        }
        return Ok(raster);
    }
    let decoded = decode_png(path)?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let data: Vec<f64> = match decoded {
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(f64::from).collect(),
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(f64::from).collect(),
        other => {
            let color = other.color();
            return Err(Error::format(
                path,
                format!("expected a grayscale PNG, found {color:?}"),
            ));
        }
    };
    Ok(ScalarRaster {
        width,
        height,
        channels: 1,
        data,
    })
}

/// Writes a single-channel raster as a 16-bit grayscale PNG of raw code values.
pub fn save_scalar_png16(path: &Path, width: usize, height: usize, codes: &[u16]) -> Result<()> {
    ImageBuffer::<Luma<u16>, _>::from_raw(width as u32, height as u32, codes.to_vec())
        .ok_or_else(|| Error::param("code buffer does not match dimensions"))?
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(e) => Error::io(path, e),
            other => Error::format(path, other.to_string()),
        })
}
