#pragma once

#include <Eigen/Dense>

// Dense kernels behind the Q-network. Every kernel exists in two variants: a
// straightforward serial reference and an OpenMP version parallelized over
// independent output rows. Both accumulate in the same element order, so their
// results are bit-identical; the tests assert this and the benchmark compares
// their throughput.

namespace dira {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

enum class Exec { Serial, Parallel };

// y[r,c] = sum_i x[r,i] * w[c,i] + b[c]; x is rows x in, w is out x in, both row-major.
void affine_forward_serial(const double* x, const double* w, const double* b, double* y,
                           int rows, int in_dim, int out_dim);
void affine_forward_parallel(const double* x, const double* w, const double* b, double* y,
                             int rows, int in_dim, int out_dim);

void relu_serial(const double* z, double* h, std::ptrdiff_t count);
void relu_parallel(const double* z, double* h, std::ptrdiff_t count);

// Gradients of y = x w' + b given upstream dy (rows x out):
//   dx[r,i] = sum_c dy[r,c] * w[c,i]
//   dw[c,i] = sum_r dy[r,c] * x[r,i]
//   db[c]   = sum_r dy[r,c]
void affine_backward_serial(const double* x, const double* w, const double* dy, double* dx,
                            double* dw, double* db, int rows, int in_dim, int out_dim);
void affine_backward_parallel(const double* x, const double* w, const double* dy, double* dx,
                              double* dw, double* db, int rows, int in_dim, int out_dim);

// dz = dh where z > 0, else 0
void relu_backward_serial(const double* z, const double* dh, double* dz, std::ptrdiff_t count);
void relu_backward_parallel(const double* z, const double* dh, double* dz, std::ptrdiff_t count);

// Dispatchers used by the network code.
void affine_forward(Exec exec, const double* x, const double* w, const double* b, double* y,
                    int rows, int in_dim, int out_dim);
void relu(Exec exec, const double* z, double* h, std::ptrdiff_t count);
void affine_backward(Exec exec, const double* x, const double* w, const double* dy, double* dx,
                     double* dw, double* db, int rows, int in_dim, int out_dim);
void relu_backward(Exec exec, const double* z, const double* dh, double* dz,
                   std::ptrdiff_t count);

}  // namespace kernels
}  // namespace dira
