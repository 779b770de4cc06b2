#pragma once

#include <memory>
#include <vector>

#include "coorbit/frames.hpp"

namespace coorbit {

// Evaluates analysis and synthesis for a list of atoms. Atoms that are whole-sample
// translates of a shared kernel times a shared modulation form a row and go through
// FFT correlation; anything else is kept as an explicit sample vector.
class AtomEngine {
public:
    struct Row {
        std::vector<Complex> kernel_hat;  // DFT of the kernel centred at sample 0
        std::vector<Complex> modulation;  // e^{2 pi i w t_n}; empty when w = 0
        std::vector<std::size_t> points;
        std::vector<std::size_t> shifts;  // sample index of each atom's centre
    };

    AtomEngine(SignalGrid grid, std::size_t count) : grid_(std::move(grid)), count_(count) {}

    void add_row(Row row) { rows_.push_back(std::move(row)); }
    void add_explicit(std::size_t point, SignalGrid atom);

    std::size_t size() const { return count_; }
    const SignalGrid& grid() const { return grid_; }
    const std::vector<Row>& rows() const { return rows_; }

    std::vector<Complex> analyze(const SignalGrid& f) const;
    SignalGrid synthesize(const std::vector<Complex>& c) const;
    SignalGrid atom(std::size_t i) const;

private:
    SignalGrid grid_;
    std::size_t count_;
    std::vector<Row> rows_;
    std::vector<std::size_t> explicit_points_;
    std::vector<SignalGrid> explicit_atoms_;
};

// Row kernel for samples k(t_n), centred at sample 0: element k mod N holds k(k h).
std::vector<Complex> kernel_spectrum_from_centered(std::vector<Complex> centered);
// Centred samples of a signal given on the grid, taking sample `centre` as the origin.
std::vector<Complex> recenter(const SignalGrid& g, std::size_t centre);

}  // namespace coorbit
