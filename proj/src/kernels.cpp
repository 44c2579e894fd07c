#include "platoon/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "platoon/common.hpp"

namespace platoon::kernels {
namespace {

inline double cosine(const double* u, const double* v, std::size_t dim)
{
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        dot += u[k] * v[k];
        nu += u[k] * u[k];
        nv += v[k] * v[k];
    }
    // sqrt of the product keeps identical vectors at exactly 1, so exact ties
    // between equal embeddings stay ties.
    return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

inline double raster_pixel(const RasterSpec& spec, std::span<const Footprint> footprints, int r,
                           int c)
{
    if (r >= spec.painted_rows) return spec.background;
    const double u = c * spec.col_to_image;
    const double v = r * spec.row_to_image;
    for (const auto& f : footprints) {
        if (u >= f.x_min && u <= f.x_max && v >= f.y_min && v <= f.y_max) return f.value;
    }
    return spec.background;
}

inline double bilinear_at(std::span<const double> grid, int width, int height, GridQuery q)
{
    if (!(q.x_sub >= 0.0 && q.y_sub >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double fx = std::floor(q.x_sub);
    const double fy = std::floor(q.y_sub);
    if (fx + 1.0 > width - 1 || fy + 1.0 > height - 1) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto x1 = static_cast<std::size_t>(fx);
    const auto y1 = static_cast<std::size_t>(fy);
    const auto w = static_cast<std::size_t>(width);
    const double dx = q.x_sub - fx;
    const double dy = q.y_sub - fy;
    const double d11 = grid[y1 * w + x1];
    const double d21 = grid[y1 * w + x1 + 1];
    const double d12 = grid[(y1 + 1) * w + x1];
    const double d22 = grid[(y1 + 1) * w + x1 + 1];
    return (1.0 - dx) * (1.0 - dy) * d11 + dx * (1.0 - dy) * d21 + (1.0 - dx) * dy * d12 +
           dx * dy * d22;
}

void check_similarity_shapes(std::span<const double> rows, std::size_t n_rows,
                             std::span<const double> cols, std::size_t n_cols, std::size_t dim,
                             std::span<double> out)
{
    if (rows.size() != n_rows * dim || cols.size() != n_cols * dim ||
        out.size() != n_rows * n_cols) {
        throw InvalidInput("similarity_matrix: buffer sizes do not match shape");
    }
}

void check_raster_shapes(const RasterSpec& spec, std::span<double> out)
{
    if (spec.width <= 0 || spec.height <= 0 ||
        out.size() != static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height)) {
        throw InvalidInput("rasterize: output size does not match map shape");
    }
}

void check_grid_shapes(std::span<const double> grid, int width, int height,
                       std::span<const GridQuery> queries, std::span<double> out)
{
    if (width <= 0 || height <= 0 ||
        grid.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) ||
        out.size() != queries.size()) {
        throw InvalidInput("bilinear_batch: buffer sizes do not match shape");
    }
}

}  // namespace

namespace serial {

void similarity_matrix(std::span<const double> rows, std::size_t n_rows,
                       std::span<const double> cols, std::size_t n_cols, std::size_t dim,
                       std::span<double> out)
{
    check_similarity_shapes(rows, n_rows, cols, n_cols, dim, out);
    for (std::size_t t = 0; t < n_rows; ++t)
        for (std::size_t d = 0; d < n_cols; ++d)
            out[t * n_cols + d] = cosine(&rows[t * dim], &cols[d * dim], dim);
}

void rasterize(const RasterSpec& spec, std::span<const Footprint> footprints,
               std::span<double> out)
{
    check_raster_shapes(spec, out);
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c)
            out[static_cast<std::size_t>(r) * spec.width + c] = raster_pixel(spec, footprints, r, c);
}

void bilinear_batch(std::span<const double> grid, int width, int height,
                    std::span<const GridQuery> queries, std::span<double> out)
{
    check_grid_shapes(grid, width, height, queries, out);
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = bilinear_at(grid, width, height, queries[i]);
}

}  // namespace serial

namespace parallel {

void similarity_matrix(std::span<const double> rows, std::size_t n_rows,
                       std::span<const double> cols, std::size_t n_cols, std::size_t dim,
                       std::span<double> out)
{
    check_similarity_shapes(rows, n_rows, cols, n_cols, dim, out);
    const auto total = static_cast<std::ptrdiff_t>(n_rows * n_cols);
#pragma omp parallel for schedule(static) if (total > 256)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        const auto t = static_cast<std::size_t>(i) / n_cols;
        const auto d = static_cast<std::size_t>(i) % n_cols;
        out[static_cast<std::size_t>(i)] = cosine(&rows[t * dim], &cols[d * dim], dim);
    }
}

void rasterize(const RasterSpec& spec, std::span<const Footprint> footprints,
               std::span<double> out)
{
    check_raster_shapes(spec, out);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c)
            out[static_cast<std::size_t>(r) * spec.width + c] = raster_pixel(spec, footprints, r, c);
}

void bilinear_batch(std::span<const double> grid, int width, int height,
                    std::span<const GridQuery> queries, std::span<double> out)
{
    check_grid_shapes(grid, width, height, queries, out);
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static) if (n > 1024)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            bilinear_at(grid, width, height, queries[static_cast<std::size_t>(i)]);
}

}  // namespace parallel

int max_threads()
{
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace platoon::kernels
