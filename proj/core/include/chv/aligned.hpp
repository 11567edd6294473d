#ifndef CHV_ALIGNED_HPP
#define CHV_ALIGNED_HPP

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace chv {

// 64-byte aligned allocator so FFT buffers share one alignment class and
// plans built on one buffer can execute on another.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{alignment}));
    }
    void deallocate(T* p, std::size_t) noexcept {
        ::operator delete(p, std::align_val_t{alignment});
    }
    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
    template <typename U>
    bool operator!=(const AlignedAllocator<U>&) const noexcept { return false; }
};

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble, AlignedAllocator<cdouble>>;
using RVector = std::vector<double, AlignedAllocator<double>>;

} // namespace chv

#endif
