#include "dira/kernels.hpp"

namespace dira::kernels {

void affine_forward_serial(const double* x, const double* w, const double* b, double* y,
                           int rows, int in_dim, int out_dim) {
    for (int r = 0; r < rows; ++r) {
        const double* xr = x + static_cast<std::ptrdiff_t>(r) * in_dim;
        double* yr = y + static_cast<std::ptrdiff_t>(r) * out_dim;
        for (int c = 0; c < out_dim; ++c) {
            const double* wc = w + static_cast<std::ptrdiff_t>(c) * in_dim;
            double acc = b[c];
            for (int i = 0; i < in_dim; ++i) acc += xr[i] * wc[i];
            yr[c] = acc;
        }
    }
}

void affine_forward_parallel(const double* x, const double* w, const double* b, double* y,
                             int rows, int in_dim, int out_dim) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        const double* xr = x + static_cast<std::ptrdiff_t>(r) * in_dim;
        double* yr = y + static_cast<std::ptrdiff_t>(r) * out_dim;
        for (int c = 0; c < out_dim; ++c) {
            const double* wc = w + static_cast<std::ptrdiff_t>(c) * in_dim;
            double acc = b[c];
            for (int i = 0; i < in_dim; ++i) acc += xr[i] * wc[i];
            yr[c] = acc;
        }
    }
}

void relu_serial(const double* z, double* h, std::ptrdiff_t count) {
    for (std::ptrdiff_t i = 0; i < count; ++i) h[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_parallel(const double* z, double* h, std::ptrdiff_t count) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) h[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void affine_backward_serial(const double* x, const double* w, const double* dy, double* dx,
                            double* dw, double* db, int rows, int in_dim, int out_dim) {
    for (int r = 0; r < rows; ++r) {
        const double* dyr = dy + static_cast<std::ptrdiff_t>(r) * out_dim;
        double* dxr = dx + static_cast<std::ptrdiff_t>(r) * in_dim;
        for (int i = 0; i < in_dim; ++i) {
            double acc = 0.0;
            for (int c = 0; c < out_dim; ++c) {
                acc += dyr[c] * w[static_cast<std::ptrdiff_t>(c) * in_dim + i];
            }
            dxr[i] = acc;
        }
    }
    for (int c = 0; c < out_dim; ++c) {
        double* dwc = dw + static_cast<std::ptrdiff_t>(c) * in_dim;
        double acc_b = 0.0;
        for (int i = 0; i < in_dim; ++i) dwc[i] = 0.0;
        for (int r = 0; r < rows; ++r) {
            const double g = dy[static_cast<std::ptrdiff_t>(r) * out_dim + c];
            const double* xr = x + static_cast<std::ptrdiff_t>(r) * in_dim;
            for (int i = 0; i < in_dim; ++i) dwc[i] += g * xr[i];
            acc_b += g;
        }
        db[c] = acc_b;
    }
}

void affine_backward_parallel(const double* x, const double* w, const double* dy, double* dx,
                              double* dw, double* db, int rows, int in_dim, int out_dim) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        const double* dyr = dy + static_cast<std::ptrdiff_t>(r) * out_dim;
        double* dxr = dx + static_cast<std::ptrdiff_t>(r) * in_dim;
        for (int i = 0; i < in_dim; ++i) {
            double acc = 0.0;
            for (int c = 0; c < out_dim; ++c) {
                acc += dyr[c] * w[static_cast<std::ptrdiff_t>(c) * in_dim + i];
            }
            dxr[i] = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int c = 0; c < out_dim; ++c) {
        double* dwc = dw + static_cast<std::ptrdiff_t>(c) * in_dim;
        double acc_b = 0.0;
        for (int i = 0; i < in_dim; ++i) dwc[i] = 0.0;
        for (int r = 0; r < rows; ++r) {
            const double g = dy[static_cast<std::ptrdiff_t>(r) * out_dim + c];
            const double* xr = x + static_cast<std::ptrdiff_t>(r) * in_dim;
            for (int i = 0; i < in_dim; ++i) dwc[i] += g * xr[i];
            acc_b += g;
        }
        db[c] = acc_b;
    }
}

void relu_backward_serial(const double* z, const double* dh, double* dz, std::ptrdiff_t count) {
    for (std::ptrdiff_t i = 0; i < count; ++i) dz[i] = z[i] > 0.0 ? dh[i] : 0.0;
}

void relu_backward_parallel(const double* z, const double* dh, double* dz, std::ptrdiff_t count) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) dz[i] = z[i] > 0.0 ? dh[i] : 0.0;
}

void affine_forward(Exec exec, const double* x, const double* w, const double* b, double* y,
                    int rows, int in_dim, int out_dim) {
    if (exec == Exec::Parallel) {
        affine_forward_parallel(x, w, b, y, rows, in_dim, out_dim);
    } else {
        affine_forward_serial(x, w, b, y, rows, in_dim, out_dim);
    }
}

void relu(Exec exec, const double* z, double* h, std::ptrdiff_t count) {
    if (exec == Exec::Parallel) {
        relu_parallel(z, h, count);
    } else {
        relu_serial(z, h, count);
    }
}

void affine_backward(Exec exec, const double* x, const double* w, const double* dy, double* dx,
                     double* dw, double* db, int rows, int in_dim, int out_dim) {
    if (exec == Exec::Parallel) {
        affine_backward_parallel(x, w, dy, dx, dw, db, rows, in_dim, out_dim);
    } else {
        affine_backward_serial(x, w, dy, dx, dw, db, rows, in_dim, out_dim);
    }
}

void relu_backward(Exec exec, const double* z, const double* dh, double* dz,
                   std::ptrdiff_t count) {
    if (exec == Exec::Parallel) {
        relu_backward_parallel(z, dh, dz, count);
    } else {
        relu_backward_serial(z, dh, dz, count);
    }
}

}  // namespace dira::kernels
