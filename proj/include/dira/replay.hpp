#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "dira/rng.hpp"

namespace dira {

struct Transition {
    Eigen::VectorXd state;
    int action = 0;  // 0-based output index
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool terminal = false;
};

// Fixed-capacity ring buffer with uniform with-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::runtime_error("ReplayBuffer: capacity must be positive");
        data_.reserve(capacity);
    }

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[head_] = std::move(t);  // overwrite the oldest entry
        }
        head_ = (head_ + 1) % capacity_;
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool ready(std::size_t warmup) const { return size() >= warmup; }

    // i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const {
        if (i >= data_.size()) throw std::out_of_range("ReplayBuffer::at");
        if (data_.size() < capacity_) return data_[i];
        return data_[(head_ + i) % capacity_];
    }

    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const {
        if (data_.empty()) throw std::runtime_error("ReplayBuffer::sample: buffer empty");
        std::vector<const Transition*> out(batch);
        for (auto& slot : out) slot = &data_[rng.uniform_index(data_.size())];
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> data_;
};

}  // namespace dira
