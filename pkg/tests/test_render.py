"""Renderer tests: projection identities, a point-in-polygon coverage
oracle, occlusion order, and camera randomization statistics."""
import numpy as np
import pytest

from ffclab.errors import ConfigError
from ffclab.geometry import quat_from_axis_angle, quat_to_matrix
from ffclab.render import (CameraParams, CameraRandomization, MaskImage,
                           agent_channels, box_corners, default_base_cameras,
                           ground_truth_masks, rasterize_boxes, read_pgm,
                           render_labels, render_masks, sample_cameras,
                           write_pgm)
from ffclab.sim import EpisodeConfig, reset

DEG = np.pi / 180.0


def overhead_camera(height=1.0, fov=40.0 * DEG, size=64):
    return CameraParams(position=np.array([0.0, 0.0, height]),
                        vertical_fov=fov, image_width=size, image_height=size)


def flat_box(center, yaw, half_xy, label=1, thickness=1e-6):
    rot = quat_to_matrix(quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), yaw))
    half = np.array([half_xy[0], half_xy[1], thickness])
    return box_corners(np.asarray(center, dtype=float), rot, half), label


class TestCameraParams:
    def test_fov_bounds_rejected(self):
        with pytest.raises(ConfigError):
            CameraParams(position=np.zeros(3), vertical_fov=0.0)
        with pytest.raises(ConfigError):
            CameraParams(position=np.zeros(3), vertical_fov=np.pi)

    def test_min_resolution_rejected(self):
        with pytest.raises(ConfigError):
            CameraParams(position=np.zeros(3), image_width=8)

    def test_axes_orthonormal(self):
        cam = CameraParams(position=np.zeros(3), yaw=0.3, pitch=0.5, roll=-0.2)
        r, u, f = cam.axes()
        mat = np.stack([r, u, f])
        np.testing.assert_allclose(mat @ mat.T, np.eye(3), atol=1e-12)

    def test_default_looks_down(self):
        cam = overhead_camera()
        r, u, f = cam.axes()
        np.testing.assert_allclose(f, [0, 0, -1], atol=1e-12)
        np.testing.assert_allclose(u, [1, 0, 0], atol=1e-12)
        np.testing.assert_allclose(r, [0, 1, 0], atol=1e-12)

    def test_optical_axis_projects_to_center(self):
        # Vertex on the optical axis lands at the image center for any fov.
        for fov in (24.0 * DEG, 35.0 * DEG, 50.0 * DEG):
            cam = overhead_camera(fov=fov)
            pix = cam.project(cam.world_to_camera(np.array([[0.0, 0.0, 0.2]])))
            np.testing.assert_allclose(pix[0], [32.0, 32.0], atol=1e-12)

    def test_fov_edge_projects_to_image_edge(self):
        cam = overhead_camera(height=1.0)
        # Point at the vertical half-fov angle maps to the top image border.
        x = np.tan(cam.vertical_fov / 2.0)
        pix = cam.project(cam.world_to_camera(np.array([[x, 0.0, 0.0]])))
        np.testing.assert_allclose(pix[0, 1], 0.0, atol=1e-9)


class TestSampleCameras:
    def test_degenerate_ranges_return_base(self):
        base = default_base_cameras()
        rand = CameraRandomization(dx_half_range=0.0, dy_half_range=0.0,
                                   dz_half_range=0.0, yaw_half_range=0.0,
                                   fov_min=35.0 * DEG, fov_max=35.0 * DEG)
        out = sample_cameras(base, rand, seed=0)
        for got, want in zip(out, base):
            np.testing.assert_allclose(got.position, want.position)
            assert got.yaw == want.yaw
            assert got.vertical_fov == pytest.approx(want.vertical_fov)

    def test_fov_always_in_range(self):
        base = default_base_cameras()
        rand = CameraRandomization()
        fovs = []
        for seed in range(5000):
            for cam in sample_cameras(base, rand, seed=seed):
                fovs.append(cam.vertical_fov)
        fovs = np.array(fovs)
        assert fovs.min() >= 24.0 * DEG
        assert fovs.max() <= 50.0 * DEG

    def test_yaw_offset_mean_near_zero(self):
        base = default_base_cameras()
        rand = CameraRandomization()
        offs = []
        for seed in range(5000):
            for cam, b in zip(sample_cameras(base, rand, seed=seed), base):
                offs.append(cam.yaw - b.yaw)
        offs = np.array(offs)
        half = rand.yaw_half_range
        stderr = (2 * half / np.sqrt(12.0)) / np.sqrt(len(offs))
        assert abs(offs.mean()) < 3 * stderr
        assert offs.min() >= -half and offs.max() <= half

    def test_deterministic_per_seed(self):
        base = default_base_cameras()
        rand = CameraRandomization()
        a = sample_cameras(base, rand, seed=11)
        b = sample_cameras(base, rand, seed=11)
        for ca, cb in zip(a, b):
            np.testing.assert_array_equal(ca.position, cb.position)
            assert ca.yaw == cb.yaw and ca.vertical_fov == cb.vertical_fov

    def test_invalid_randomization_rejected(self):
        with pytest.raises(ConfigError):
            CameraRandomization(fov_min=0.9, fov_max=0.5)
        with pytest.raises(ConfigError):
            CameraRandomization(dz_half_range=-0.01)


def pixel_count_oracle(cam, corners_world):
    """Inclusive half-space point-in-polygon count at pixel centers.

    Independent of the rasterizer: projects the polygon, sorts vertices CCW,
    and tests every pixel center against all edges with >= 0.
    """
    pix = cam.project(cam.world_to_camera(corners_world))
    centroid = pix.mean(axis=0)
    order = np.argsort(np.arctan2(pix[:, 1] - centroid[1],
                                  pix[:, 0] - centroid[0]))
    poly = pix[order]
    # Ensure CCW in (u, v) coordinates via the shoelace sign.
    area2 = 0.0
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        area2 += a[0] * b[1] - b[0] * a[1]
    if area2 < 0:
        poly = poly[::-1]
    xs = np.arange(cam.image_width) + 0.5
    ys = np.arange(cam.image_height) + 0.5
    px, py = np.meshgrid(xs, ys)
    inside = np.ones_like(px, dtype=bool)
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        inside &= ((b[0] - a[0]) * (py - a[1])
                   - (b[1] - a[1]) * (px - a[0])) >= 0.0
    return int(inside.sum()), inside


class TestRasterizer:
    def test_square_matches_point_sampling_oracle_exactly(self):
        cam = overhead_camera(height=2.0, size=64)
        rng = np.random.default_rng(5)
        for _ in range(20):
            center = np.append(rng.uniform(-0.3, 0.3, size=2), 0.0)
            yaw = rng.uniform(0, 2 * np.pi)
            half = rng.uniform(0.05, 0.4, size=2)
            corners, label = flat_box(center, yaw, half)
            img = rasterize_boxes([(corners, label)], cam)
            # The flat box's top face carries the whole silhouette.
            top = corners[_top_face_mask(corners)]
            want, _ = pixel_count_oracle(cam, top)
            assert int((img.labels == label).sum()) == want

    def test_centered_box_symmetric_on_axis(self):
        cam = overhead_camera(height=1.0)
        corners, _ = flat_box((0.0, 0.0, 0.0), 0.0, (0.2, 0.2), label=2)
        img = rasterize_boxes([(corners, 2)], cam)
        nz = np.argwhere(img.labels != 0)
        assert img.labels[img.labels != 0].tolist().count(2) == len(nz)
        centroid = nz.mean(axis=0) + 0.5
        assert abs(centroid[0] - 32.0) <= 1.0
        assert abs(centroid[1] - 32.0) <= 1.0

    def test_occlusion_nearer_label_wins(self):
        cam = overhead_camera(height=1.0)
        far, _ = flat_box((0.0, 0.0, 0.0), 0.0, (0.3, 0.3))
        near, _ = flat_box((0.0, 0.0, 0.2), 0.0, (0.1, 0.1))
        img = rasterize_boxes([(far, 1), (near, 2)], cam)
        img_rev = rasterize_boxes([(near, 2), (far, 1)], cam)
        np.testing.assert_array_equal(img.labels, img_rev.labels)
        assert img.labels[32, 32] == 2
        assert img.labels[10, 10] == 1
        assert (img.labels == 2).sum() > 0 and (img.labels == 1).sum() > 0

    def test_everything_behind_camera_renders_empty(self):
        cam = overhead_camera(height=-1.0)   # scene is above the camera
        corners, _ = flat_box((0.0, 0.0, 0.0), 0.0, (0.3, 0.3))
        img = rasterize_boxes([(corners, 1)], cam)
        assert not img.labels.any()

    def test_box_straddling_near_plane_is_clipped_not_error(self):
        cam = overhead_camera(height=0.05)
        rot = np.eye(3)
        corners = box_corners(np.array([0.3, 0.0, 0.0]), rot,
                              np.array([0.5, 0.1, 0.1]))
        img = rasterize_boxes([(corners, 1)], cam)
        assert img.labels.max() <= 1

    def test_projected_vertices_near_footprint(self):
        cam = overhead_camera(height=2.0)
        rng = np.random.default_rng(9)
        for _ in range(10):
            center = np.append(rng.uniform(-0.2, 0.2, size=2),
                               rng.uniform(0.0, 0.5))
            corners, _ = flat_box(center, rng.uniform(0, np.pi), (0.2, 0.15))
            img = rasterize_boxes([(corners, 1)], cam)
            cov = img.labels == 1
            pix = cam.project(cam.world_to_camera(corners))
            for u, v in pix:
                iu = int(np.clip(np.floor(u), 0, cam.image_width - 1))
                iv = int(np.clip(np.floor(v), 0, cam.image_height - 1))
                lo_v, hi_v = max(iv - 1, 0), min(iv + 2, cam.image_height)
                lo_u, hi_u = max(iu - 1, 0), min(iu + 2, cam.image_width)
                assert cov[lo_v:hi_v, lo_u:hi_u].any()


def _top_face_mask(corners):
    z = corners[:, 2]
    return z >= z.mean()


class TestSceneRendering:
    def setup_method(self):
        self.state = reset(EpisodeConfig(), seed=3)
        self.cams = default_base_cameras()

    def test_labels_in_range_and_all_classes_visible(self):
        obs = render_masks(self.state, self.cams)
        for mask in (obs.mask_cam1, obs.mask_cam2):
            assert mask.labels.dtype == np.uint8
            assert set(np.unique(mask.labels)) <= {0, 1, 2, 3}
            assert {1, 2, 3} <= set(np.unique(mask.labels))

    def test_ee_orientation_copied(self):
        obs = render_masks(self.state, self.cams)
        np.testing.assert_allclose(np.linalg.norm(obs.ee_orientation), 1.0,
                                   atol=1e-9)

    def test_deterministic(self):
        a = render_masks(self.state, self.cams)
        b = render_masks(self.state, self.cams)
        np.testing.assert_array_equal(a.mask_cam1.labels, b.mask_cam1.labels)
        np.testing.assert_array_equal(a.mask_cam2.labels, b.mask_cam2.labels)

    def test_ground_truth_partitions_nonbackground(self):
        obs = render_masks(self.state, self.cams)
        gts = ground_truth_masks(self.state, self.cams)
        for mask, gt in zip((obs.mask_cam1, obs.mask_cam2), gts):
            union = np.zeros_like(mask.labels, dtype=bool)
            for c, m in gt.items():
                assert not (union & m).any()   # per-class masks disjoint
                union |= m
            np.testing.assert_array_equal(union, mask.labels != 0)

    def test_occluded_cable_base_excluded_from_ffc_mask(self):
        # Links under the end-effector proxy must not appear in the FFC mask.
        gt = ground_truth_masks(self.state, self.cams)[0]
        labels = render_labels(self.state, self.cams[0]).labels
        assert not (gt[1] & (labels == 3)).any()

    def test_resolution_independence_of_area_fractions(self):
        lo = render_labels(self.state, self.cams[0])
        hi_cam = CameraParams(position=self.cams[0].position,
                              yaw=self.cams[0].yaw, pitch=self.cams[0].pitch,
                              vertical_fov=self.cams[0].vertical_fov,
                              image_width=128, image_height=128)
        hi = render_labels(self.state, hi_cam)
        for c in (0, 1, 2, 3):
            frac_lo = (lo.labels == c).mean()
            frac_hi = (hi.labels == c).mean()
            assert abs(frac_lo - frac_hi) < 0.02

    def test_agent_channels_hide_ee(self):
        obs = render_masks(self.state, self.cams)
        chans = agent_channels(obs)
        assert chans.shape == (2, 64, 64)
        assert chans.max() <= 1.0 and chans.min() >= 0.0
        ee = obs.mask_cam1.labels == 3
        assert ee.any()
        assert np.all(chans[0][ee] == 0.0)


class TestPgm:
    def test_roundtrip(self, tmp_path):
        state = reset(EpisodeConfig(), seed=1)
        cam = default_base_cameras()[0]
        mask = render_labels(state, cam)
        path = tmp_path / "mask.pgm"
        write_pgm(mask, path)
        back = read_pgm(path)
        np.testing.assert_array_equal(back, mask.labels.astype(np.uint16) * 60)

    def test_rejects_non_pgm(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
        with pytest.raises(ValueError):
            read_pgm(p)


class TestMaskImage:
    def test_shape_checked(self):
        with pytest.raises(AssertionError):
            MaskImage(width=4, height=4, labels=np.zeros((3, 4), np.uint8))
