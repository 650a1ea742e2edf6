#pragma once

#include <condition_variable>
#include <mutex>
#include <optional>

namespace retarget {

/// Single-slot latest-value mailbox between one producer and one consumer.
/// publish() overwrites an unconsumed value (counted as a drop);
/// publish_blocking() waits for the slot to empty instead (lossless mode).
template <typename T>
class LatestValueMailbox {
public:
    void publish(T value) {
        {
            std::lock_guard lock(mutex_);
            if (slot_.has_value()) ++dropped_;
            slot_ = std::move(value);
        }
        cv_nonempty_.notify_one();
    }

    void publish_blocking(T value) {
        std::unique_lock lock(mutex_);
        cv_empty_.wait(lock, [&] { return !slot_.has_value() || closed_; });
        if (closed_) return;
        slot_ = std::move(value);
        lock.unlock();
        cv_nonempty_.notify_one();
    }

    /// Take the latest value, waiting until one arrives or the box closes.
    std::optional<T> take_blocking() {
        std::unique_lock lock(mutex_);
        cv_nonempty_.wait(lock, [&] { return slot_.has_value() || closed_; });
        std::optional<T> out = std::move(slot_);
        slot_.reset();
        lock.unlock();
        cv_empty_.notify_one();
        return out;
    }

    /// Take the latest value if present, never waits.
    std::optional<T> try_take() {
        std::lock_guard lock(mutex_);
        std::optional<T> out = std::move(slot_);
        slot_.reset();
        cv_empty_.notify_one();
        return out;
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_nonempty_.notify_all();
        cv_empty_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_;
    }

    long dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_nonempty_, cv_empty_;
    std::optional<T> slot_;
    bool closed_ = false;
    long dropped_ = 0;
};

}  // namespace retarget
