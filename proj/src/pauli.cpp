#include "nqs/pauli.hpp"

#include <stdexcept>

namespace nqs {

PauliString PauliString::parse(std::string_view text) {
    PauliString out;
    out.axes.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'I': case 'i': case '1': out.axes.push_back(Pauli::I); break;
            case 'X': case 'x': out.axes.push_back(Pauli::X); break;
            case 'Y': case 'y': out.axes.push_back(Pauli::Y); break;
            case 'Z': case 'z': out.axes.push_back(Pauli::Z); break;
            default:
                throw std::invalid_argument("invalid Pauli axis '" + std::string(1, c) +
                                            "' in \"" + std::string(text) + "\"");
        }
    }
    if (out.axes.empty()) throw std::invalid_argument("empty Pauli string");
    return out;
}

std::string PauliString::str() const {
    std::string s;
    s.reserve(axes.size());
    for (Pauli p : axes) s.push_back(static_cast<char>(p));
    return s;
}

bool PauliString::diagonal() const {
    for (Pauli p : axes)
        if (p == Pauli::X || p == Pauli::Y) return false;
    return true;
}

std::vector<int> PauliString::support() const {
    std::vector<int> sites;
    for (int i = 0; i < n_sites(); ++i)
        if (axes[i] != Pauli::I) sites.push_back(i);
    return sites;
}

}  // namespace nqs
