// Runs the full classification pipeline over every built-in example field
// and prints a one-line verdict for each.

#include <iostream>

#include <linefib/linefib.hpp>

int main() {
    using namespace linefib;
    const Box box{Point3(-1, -1, -1), Point3(1, 1, 1)};
    for (const auto& entry : example_gallery()) {
        ClassifyOptions opts;
        if (entry.theta) opts.theta_closed_form = parse_expression(*entry.theta);
        ClassifyResult res = classify_field(make_field(entry), box, 5, {}, opts);
        std::cout << entry.name << ": " << to_string(res.verdict);
        if (res.pullback_defect)
            std::cout << " (pullback defect " << *res.pullback_defect << ")";
        if (!res.note.empty()) std::cout << " -- " << res.note;
        std::cout << "\n";
    }
    return 0;
}
