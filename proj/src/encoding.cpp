#include "dira/encoding.hpp"

#include <stdexcept>

namespace dira {

int code_width(int num_subsystems) {
    if (num_subsystems < 1) throw std::runtime_error("code_width: need at least 1 subsystem");
    int width = 0;
    for (int v = num_subsystems; v > 0; v >>= 1) ++width;
    return width;
}

void encode_component(int value, int width, double* out) {
    if (value < 1 || value >= (1 << width)) {
        throw std::runtime_error("encode_component: value does not fit the code width");
    }
    for (int b = 0; b < width; ++b) {
        out[b] = ((value >> (width - 1 - b)) & 1) ? 1.0 : 0.0;
    }
}

int decode_component(const double* bits, int width) {
    int value = 0;
    for (int b = 0; b < width; ++b) {
        value = (value << 1) | (bits[b] != 0.0 ? 1 : 0);
    }
    return value;
}

RepresentationVector::RepresentationVector(int num_channels, int width)
    : channels_(num_channels), width_(width), fill_(0),
      bits_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_channels) * width)) {
    if (num_channels < 1 || width < 1) {
        throw std::runtime_error("RepresentationVector: bad dimensions");
    }
}

void RepresentationVector::clear() {
    bits_.setZero();
    fill_ = 0;
}

void RepresentationVector::assign_next(int value) {
    if (fill_ >= channels_) throw std::runtime_error("RepresentationVector: already full");
    encode_component(value, width_, bits_.data() + static_cast<Eigen::Index>(fill_) * width_);
    ++fill_;
}

int RepresentationVector::component(int j) const {
    if (j < 0 || j >= channels_) throw std::runtime_error("RepresentationVector: slot out of range");
    return decode_component(bits_.data() + static_cast<Eigen::Index>(j) * width_, width_);
}

Eigen::VectorXd encode_input(const Eigen::VectorXd& x, const RepresentationVector& h) {
    Eigen::VectorXd out(x.size() + h.flat().size());
    out << x, h.flat();
    return out;
}

}  // namespace dira
