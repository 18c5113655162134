namespace Geom
{
    /// A 2D point.
    public class Point
    {
        public double X;
        public double Y;

        public Point(double x, double y)
        {
            X = x;
            Y = y;
        }

        public double Dot(Point other)
        {
            return X * other.X + Y * other.Y;
        }
    }
}
