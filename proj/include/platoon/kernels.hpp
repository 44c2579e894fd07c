#pragma once

// Data-parallel inner loops used by perception, tracking and depth lookup.
//
// Every kernel exists twice: `serial::` is the straightforward reference and
// `parallel::` the OpenMP version used on the hot path. Each output element is
// computed independently, so both produce bit-identical results; the tests
// and the benchmark rely on that.

#include <cstddef>
#include <span>
#include <vector>

namespace platoon::kernels {

// Axis-aligned rectangle in image pixels with the value painted inside it.
struct Footprint {
    double x_min, x_max;
    double y_min, y_max;
    double value;
};

struct RasterSpec {
    int width;           // map columns
    int height;          // map rows
    double col_to_image; // image x per map column
    double row_to_image; // image y per map row
    double background;
    int painted_rows;    // rows [0, painted_rows) are rasterized; the rest keep background
};

struct GridQuery {
    double x_sub;
    double y_sub;
};

namespace serial {

// out[t * n_det + d] = cosine similarity of rows[t] and cols[d], all of `dim`.
// Inputs are expected unit-norm; the kernel still divides by the norms.
void similarity_matrix(std::span<const double> rows, std::size_t n_rows,
                       std::span<const double> cols, std::size_t n_cols, std::size_t dim,
                       std::span<double> out);

// Each map pixel (r, c) samples image point (c * col_to_image, r * row_to_image)
// and takes the value of the first footprint (in the given order) covering it.
void rasterize(const RasterSpec& spec, std::span<const Footprint> footprints,
               std::span<double> out);

// Bilinear lookup on a row-major grid; NaN where the 2x2 neighbourhood is
// incomplete.
void bilinear_batch(std::span<const double> grid, int width, int height,
                    std::span<const GridQuery> queries, std::span<double> out);

}  // namespace serial

namespace parallel {

void similarity_matrix(std::span<const double> rows, std::size_t n_rows,
                       std::span<const double> cols, std::size_t n_cols, std::size_t dim,
                       std::span<double> out);
void rasterize(const RasterSpec& spec, std::span<const Footprint> footprints,
               std::span<double> out);
void bilinear_batch(std::span<const double> grid, int width, int height,
                    std::span<const GridQuery> queries, std::span<double> out);

}  // namespace parallel

// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace platoon::kernels
