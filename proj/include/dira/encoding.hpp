#pragma once

#include <Eigen/Dense>

namespace dira {

// Bits needed to write the values 1..n in plain binary (value 3 -> "11",
// value 4 -> "100"). The all-zero code is reserved for "not assigned yet",
// which is why values are encoded as themselves rather than shifted to 0..n-1.
int code_width(int num_subsystems);

// Big-endian binary code of value (1-based) into out[0..width-1] as 0.0/1.0.
void encode_component(int value, int width, double* out);

// Inverse of encode_component; 0 means the all-zero "unassigned" code.
int decode_component(const double* bits, int width);

// The per-channel assignment trace built up during one scheduling step: M
// fixed-width slots, filled left to right, all-zero past the fill mark.
class RepresentationVector {
public:
    RepresentationVector(int num_channels, int width);

    void clear();
    void assign_next(int value);  // encode value into the next open slot
    int fill() const { return fill_; }
    int num_channels() const { return channels_; }
    int width() const { return width_; }
    const Eigen::VectorXd& flat() const { return bits_; }
    int component(int j) const;  // decoded value of slot j, 0 if unassigned

private:
    int channels_;
    int width_;
    int fill_;
    Eigen::VectorXd bits_;
};

// Network input: plant state followed by the flattened representation vector.
Eigen::VectorXd encode_input(const Eigen::VectorXd& x, const RepresentationVector& h);

}  // namespace dira
