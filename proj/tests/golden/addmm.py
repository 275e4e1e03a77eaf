# Generated by tilewright from kernel "addmm". Do not edit.

import torch
import triton
import triton.language as tl


@triton.jit
def addmm_kernel(
    ptr_input,
    input_size_0,
    input_size_1,
    input_stride_0,
    input_stride_1,
    ptr_mat1,
    mat1_size_0,
    mat1_size_1,
    mat1_stride_0,
    mat1_stride_1,
    ptr_mat2,
    mat2_size_0,
    mat2_size_1,
    mat2_stride_0,
    mat2_stride_1,
    beta,
    alpha,
    ptr_output,
    output_size_0,
    output_size_1,
    output_stride_0,
    output_stride_1,
    BLOCK_SIZE_M: tl.constexpr,
    BLOCK_SIZE_N: tl.constexpr,
    BLOCK_SIZE_K: tl.constexpr,
):
    pid = tl.program_id(0)
    pid_0 = pid // tl.cdiv(input_size_1, BLOCK_SIZE_N) % tl.cdiv(input_size_0, BLOCK_SIZE_M)
    pid_1 = pid % tl.cdiv(input_size_1, BLOCK_SIZE_N)
    input_lane_0 = tl.arange(0, BLOCK_SIZE_M)[:, None]
    input_lane_1 = tl.arange(0, BLOCK_SIZE_N)[None, :]
    input_offsets = (pid_0 * BLOCK_SIZE_M + input_lane_0) * input_stride_0 + (pid_1 * BLOCK_SIZE_N + input_lane_1) * input_stride_1
    input_mask = (pid_0 * BLOCK_SIZE_M + input_lane_0 < input_size_0) & (pid_1 * BLOCK_SIZE_N + input_lane_1 < input_size_1)
    mat1_lane_0 = tl.arange(0, BLOCK_SIZE_M)[:, None]
    mat1_lane_1 = tl.arange(0, BLOCK_SIZE_K)[None, :]
    mat2_lane_0 = tl.arange(0, BLOCK_SIZE_K)[:, None]
    mat2_lane_1 = tl.arange(0, BLOCK_SIZE_N)[None, :]
    output_lane_0 = tl.arange(0, BLOCK_SIZE_M)[:, None]
    output_lane_1 = tl.arange(0, BLOCK_SIZE_N)[None, :]
    output_offsets = (pid_0 * BLOCK_SIZE_M + output_lane_0) * output_stride_0 + (pid_1 * BLOCK_SIZE_N + output_lane_1) * output_stride_1
    output_mask = (pid_0 * BLOCK_SIZE_M + output_lane_0 < output_size_0) & (pid_1 * BLOCK_SIZE_N + output_lane_1 < output_size_1)
    accumulator = tl.zeros((BLOCK_SIZE_M, BLOCK_SIZE_N), dtype=tl.float32)
    for k in range(tl.cdiv(mat1_size_1, BLOCK_SIZE_K)):
        mat1_offsets = (pid_0 * BLOCK_SIZE_M + mat1_lane_0) * mat1_stride_0 + (k * BLOCK_SIZE_K + mat1_lane_1) * mat1_stride_1
        mat1_mask = (pid_0 * BLOCK_SIZE_M + mat1_lane_0 < mat1_size_0) & (k * BLOCK_SIZE_K + mat1_lane_1 < mat1_size_1)
        mat2_offsets = (k * BLOCK_SIZE_K + mat2_lane_0) * mat2_stride_0 + (pid_1 * BLOCK_SIZE_N + mat2_lane_1) * mat2_stride_1
        mat2_mask = (k * BLOCK_SIZE_K + mat2_lane_0 < mat2_size_0) & (pid_1 * BLOCK_SIZE_N + mat2_lane_1 < mat2_size_1)
        accumulator += tl.dot(tl.load(ptr_mat1 + mat1_offsets, mask=mat1_mask, other=0.0), tl.load(ptr_mat2 + mat2_offsets, mask=mat2_mask, other=0.0), allow_tf32=False)
    tl.store(ptr_output + output_offsets, beta * tl.load(ptr_input + input_offsets, mask=input_mask, other=0.0) + alpha * accumulator, mask=output_mask)


def addmm_grid(input_size_0, input_size_1, BLOCK_SIZE_M, BLOCK_SIZE_N):
    return (triton.cdiv(input_size_0, BLOCK_SIZE_M) * triton.cdiv(input_size_1, BLOCK_SIZE_N),)


def addmm(input, mat1, mat2, beta, alpha, output, *, BLOCK_SIZE_M, BLOCK_SIZE_N, BLOCK_SIZE_K):
    assert isinstance(input, torch.Tensor) and input.dim() == 2
    input_size_0 = input.size(0)
    input_size_1 = input.size(1)
    input_stride_0 = input.stride(0)
    input_stride_1 = input.stride(1)
    assert isinstance(mat1, torch.Tensor) and mat1.dim() == 2
    mat1_size_0 = mat1.size(0)
    mat1_size_1 = mat1.size(1)
    mat1_stride_0 = mat1.stride(0)
    mat1_stride_1 = mat1.stride(1)
    assert isinstance(mat2, torch.Tensor) and mat2.dim() == 2
    mat2_size_0 = mat2.size(0)
    mat2_size_1 = mat2.size(1)
    mat2_stride_0 = mat2.stride(0)
    mat2_stride_1 = mat2.stride(1)
    beta = float(beta)
    alpha = float(alpha)
    assert isinstance(output, torch.Tensor) and output.dim() == 2
    output_size_0 = output.size(0)
    output_size_1 = output.size(1)
    output_stride_0 = output.stride(0)
    output_stride_1 = output.stride(1)
    assert triton.cdiv(input_size_0, BLOCK_SIZE_M) == triton.cdiv(mat1_size_0, BLOCK_SIZE_M), "level-0 dim 0 of 'input' and 'mat1'"
    assert triton.cdiv(input_size_1, BLOCK_SIZE_N) == triton.cdiv(output_size_1, BLOCK_SIZE_N), "level-0 dim 1 of 'input' and 'mat1'"
    assert triton.cdiv(input_size_0, BLOCK_SIZE_M) == triton.cdiv(output_size_0, BLOCK_SIZE_M), "level-0 dim 0 of 'input' and 'mat2'"
    assert triton.cdiv(input_size_1, BLOCK_SIZE_N) == triton.cdiv(mat2_size_1, BLOCK_SIZE_N), "level-0 dim 1 of 'input' and 'mat2'"
    assert triton.cdiv(input_size_0, BLOCK_SIZE_M) == triton.cdiv(output_size_0, BLOCK_SIZE_M), "level-0 dim 0 of 'input' and 'output'"
    assert triton.cdiv(input_size_1, BLOCK_SIZE_N) == triton.cdiv(output_size_1, BLOCK_SIZE_N), "level-0 dim 1 of 'input' and 'output'"
    assert mat1_size_1 == mat2_size_0, "inner dimensions"
    assert mat1_size_0 == output_size_0, "output rows"
    assert mat2_size_1 == output_size_1, "output columns"
    assert input_size_0 == output_size_0, "input rows"
    assert input_size_1 == output_size_1, "input columns"
    grid = addmm_grid(input_size_0, input_size_1, BLOCK_SIZE_M, BLOCK_SIZE_N)
    addmm_kernel[grid](
        input,
        input_size_0,
        input_size_1,
        input_stride_0,
        input_stride_1,
        mat1,
        mat1_size_0,
        mat1_size_1,
        mat1_stride_0,
        mat1_stride_1,
        mat2,
        mat2_size_0,
        mat2_size_1,
        mat2_stride_0,
        mat2_stride_1,
        beta,
        alpha,
        output,
        output_size_0,
        output_size_1,
        output_stride_0,
        output_stride_1,
        BLOCK_SIZE_M,
        BLOCK_SIZE_N,
        BLOCK_SIZE_K,
    )
    return output
