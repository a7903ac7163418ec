#ifndef NQS_PAULI_HPP
#define NQS_PAULI_HPP

#include <string>
#include <string_view>
#include <vector>

namespace nqs {

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

// Product operator sigma_1^{a_1} x ... x sigma_N^{a_N}.
struct PauliString {
    std::vector<Pauli> axes;

    // One letter per site, e.g. "ZZ", "XXI", "IYZ".
    static PauliString parse(std::string_view text);

    std::string str() const;
    int n_sites() const { return static_cast<int>(axes.size()); }

    // true when the string contains no X or Y
    bool diagonal() const;

    // sites carrying a non-identity factor
    std::vector<int> support() const;
};

}  // namespace nqs

#endif
