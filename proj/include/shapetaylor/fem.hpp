#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace shapetaylor {

struct MeshGrading {
    enum class Kind { OriginLinear, BoundaryInverse };
    Kind kind = Kind::OriginLinear;
    double strength = 20.0;  // max ratio between coarsest and finest h
};

struct Mesh {
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise
    std::vector<char> boundary_vertex;
    double h_boundary = 0.0;
    MeshGrading grading;

    double area() const;           // straight-edge polygon area
    double min_angle_deg() const;  // over straight triangles
};

/// Concentric-ring triangulation of the unit disk with radial grading:
/// origin-linear    h(r) ~ h_boundary * max(r, 1/strength)
/// boundary-inverse h(r) ~ h_boundary * clamp((1-r)/d_floor, 1, strength)
Mesh build_graded_disk_mesh(double h_boundary, MeshGrading::Kind kind, double strength,
                            std::size_t vertex_budget = 5'000'000);

struct MeshStats {
    std::size_t n_vertices = 0;
    std::size_t n_triangles = 0;
    double min_angle_deg = 0.0;
    double area = 0.0;
    double h_boundary = 0.0;
    double h_max = 0.0;
};
MeshStats mesh_stats(const Mesh& mesh);
void write_off(const Mesh& mesh, std::ostream& out);

/// Matrix coefficient sampled on the system's quadrature points. Sparse form
/// lists (point index, value) pairs with indices strictly increasing; entries
/// not listed are exactly zero.
struct CoeffField {
    bool dense = false;
    std::vector<std::uint32_t> idx;
    std::vector<Eigen::Matrix2d> val;

    static CoeffField constant(const Eigen::Matrix2d& m, std::size_t n_quad);
    std::size_t byte_size() const { return idx.capacity() * sizeof(std::uint32_t) + val.capacity() * sizeof(Eigen::Matrix2d); }
    bool empty() const { return val.empty(); }
};

struct ScalarField {
    bool dense = false;
    std::vector<std::uint32_t> idx;
    std::vector<double> val;

    static ScalarField constant(double v, std::size_t n_quad);
    bool empty() const { return val.empty(); }
};

/// P2 Lagrange space on the disk mesh with homogeneous Dirichlet boundary.
/// Elements with a boundary edge are isoparametric: their edge midpoint node
/// sits on the unit circle and the geometry map is quadratic there.
class FemSystem {
public:
    explicit FemSystem(Mesh mesh, double a_value = 1.0, int quadrature_degree = 5,
                       double solver_tol = 1e-10);

    const Mesh& mesh() const { return mesh_; }
    int n_dofs() const { return static_cast<int>(node_pos_.size()); }
    int n_interior() const { return n_interior_; }
    int n_quad() const { return static_cast<int>(qp_pos_.size()); }
    int quad_per_element() const { return nq_; }
    double a_value() const { return a_value_; }

    const std::vector<Eigen::Vector2d>& quad_points() const { return qp_pos_; }
    const std::vector<Eigen::Vector2d>& node_positions() const { return node_pos_; }
    const std::vector<int>& interior_index() const { return interior_index_; }

    /// K_pq = sum_T sum_quad w (C grad phi_q) . grad phi_p, Dirichlet rows and
    /// columns eliminated (interior x interior block).
    Eigen::SparseMatrix<double> assemble_operator(const CoeffField& field) const;

    /// (int (C grad u) . grad phi_p)_p, matrix-free over the field's entries.
    Eigen::VectorXd apply_weighted_gradient_form(const CoeffField& field, const Eigen::VectorXd& u) const;

    Eigen::VectorXd assemble_load(const ScalarField& field) const;

    /// Direct solve of stiffness0 w = rhs; verifies the residual against the
    /// configured tolerance.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    double v_norm(const Eigen::VectorXd& u) const;

    const Eigen::SparseMatrix<double>& stiffness0() const { return stiffness0_; }
    const Eigen::SparseMatrix<double>& identity_stiffness() const { return identity_stiffness_; }

    /// Interior-dof interpolation of a function (used by test oracles).
    Eigen::VectorXd interpolate_interior(const std::function<double(const Eigen::Vector2d&)>& f) const;

    double h1_seminorm_error(const Eigen::VectorXd& u,
                             const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& grad_exact) const;

private:
    void build_dofs();
    void build_geometry();

    Mesh mesh_;
    double a_value_;
    int nq_;
    double solver_tol_;

    // nodes: vertices then edge midpoints
    std::vector<Eigen::Vector2d> node_pos_;
    std::vector<char> node_boundary_;
    std::vector<std::array<int, 6>> element_nodes_;
    std::vector<int> interior_index_;  // dof -> interior index or -1
    int n_interior_ = 0;

    // per element-qp geometry
    std::vector<Eigen::Vector2d> qp_pos_;
    std::vector<double> qp_wdetj_;
    std::vector<Eigen::Matrix2d> qp_invJT_;

    Eigen::SparseMatrix<double> identity_stiffness_;
    Eigen::SparseMatrix<double> stiffness0_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

}  // namespace shapetaylor
