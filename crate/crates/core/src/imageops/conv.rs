use super::{reflect, Image, ImageError};

/// Dense 2-D kernel with odd height and width, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    height: usize,
    width: usize,
    taps: Vec<f64>,
}

impl Kernel {
    pub fn new(height: usize, width: usize, taps: Vec<f64>) -> Result<Self, ImageError> {
        if height.is_multiple_of(2) || width.is_multiple_of(2) {
            return Err(ImageError::EvenKernel { height, width });
        }
        if taps.len() != height * width {
            return Err(ImageError::BufferSize {
                expected: height * width,
                got: taps.len(),
            });
        }
        Ok(Self {
            height,
            width,
            taps,
        })
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self, ImageError> {
        Self::new(N, N, rows.iter().flatten().copied().collect())
    }

    /// Outer product `col[i] * row[j]`.
    pub fn outer(col: &[f64], row: &[f64]) -> Result<Self, ImageError> {
        let taps = col
            .iter()
            .flat_map(|&a| row.iter().map(move |&b| a * b))
            .collect();
        Self::new(col.len(), row.len(), taps)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.width + col]
    }

    /// Kernel rotated by 180 degrees.
    pub fn flipped(&self) -> Kernel {
        let mut taps = self.taps.clone();
        taps.reverse();
        Kernel {
            height: self.height,
            width: self.width,
            taps,
        }
    }

    pub fn transpose(&self) -> Kernel {
        let mut taps = Vec::with_capacity(self.taps.len());
        for c in 0..self.width {
            for r in 0..self.height {
                taps.push(self.get(r, c));
            }
        }
        Kernel {
            height: self.width,
            width: self.height,
            taps,
        }
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

fn check_extent(img: &Image, kh: usize, kw: usize) -> Result<(), ImageError> {
    if kh > 2 * img.height() || kw > 2 * img.width() {
        return Err(ImageError::KernelTooLarge {
            kh,
            kw,
            height: img.height(),
            width: img.width(),
        });
    }
    Ok(())
}

/// Copy of the image with `ph` rows and `pw` columns of reflect padding on
/// each side; returns the buffer and its row stride.
fn padded(img: &Image, ph: usize, pw: usize) -> (Vec<f64>, usize) {
    let (h, w) = (img.height(), img.width());
    let stride = w + 2 * pw;
    let cols: Vec<usize> = (0..stride).map(|c| reflect(c as isize - pw as isize, w)).collect();
    let mut buf = Vec::with_capacity((h + 2 * ph) * stride);
    for r in 0..h + 2 * ph {
        let sr = reflect(r as isize - ph as isize, h);
        let line = &img.pixels()[sr * w..(sr + 1) * w];
        buf.extend(cols.iter().map(|&c| line[c]));
    }
    (buf, stride)
}

/// True 2-D convolution, `out(r, c) = sum K(i, j) * img(r + h - i, c + w - j)`
/// where `h, w` are the kernel half-sizes. Output has the input's shape.
pub fn convolve2d(img: &Image, kernel: &Kernel) -> Result<Image, ImageError> {
    let (kh, kw) = (kernel.height(), kernel.width());
    check_extent(img, kh, kw)?;
    let (h, w) = (img.height(), img.width());
    let (src, stride) = padded(img, kh / 2, kw / 2);
    // with the kernel rotated the sum runs forward over the padded window
    let k = kernel.flipped();
    let mut out = vec![0.0; h * w];
    for (r, row) in out.chunks_exact_mut(w).enumerate() {
        for i in 0..kh {
            let line = &src[(r + i) * stride..(r + i + 1) * stride];
            for j in 0..kw {
                let tap = k.get(i, j);
                if tap == 0.0 {
                    continue;
                }
                row.iter_mut()
                    .zip(&line[j..j + w])
                    .for_each(|(o, &v)| *o += tap * v);
            }
        }
    }
    Image::new(h, w, out)
}

/// Convolution with the separable kernel `outer(col_taps, row_taps)`: the
/// row kernel runs along x (columns), the column kernel along y (rows).
pub fn convolve_separable(
    img: &Image,
    col_taps: &[f64],
    row_taps: &[f64],
) -> Result<Image, ImageError> {
    let (kh, kw) = (col_taps.len(), row_taps.len());
    if kh % 2 == 0 || kw % 2 == 0 {
        return Err(ImageError::EvenKernel {
            height: kh,
            width: kw,
        });
    }
    check_extent(img, kh, kw)?;
    let (h, w) = (img.height(), img.width());

    let (src, stride) = padded(img, 0, kw / 2);
    let mut tmp = vec![0.0; h * w];
    for (r, row) in tmp.chunks_exact_mut(w).enumerate() {
        let line = &src[r * stride..(r + 1) * stride];
        for (j, &tap) in row_taps.iter().rev().enumerate() {
            row.iter_mut()
                .zip(&line[j..j + w])
                .for_each(|(o, &v)| *o += tap * v);
        }
    }

    let half = (kh / 2) as isize;
    let mut out = vec![0.0; h * w];
    for (r, row) in out.chunks_exact_mut(w).enumerate() {
        for (i, &tap) in col_taps.iter().rev().enumerate() {
            let sr = reflect(r as isize - half + i as isize, h);
            row.iter_mut()
                .zip(&tmp[sr * w..(sr + 1) * w])
                .for_each(|(o, &v)| *o += tap * v);
        }
    }
    Image::new(h, w, out)
}
