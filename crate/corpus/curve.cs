namespace Geom
{
    public class Curve
    {
        private Point[] points;
        private int count;

        public Curve(int capacity)
        {
            points = new Point[capacity];
            count = 0;
        }

        public void Add(Point p)
        {
            points[count] = p;
            count++;
        }

        public double Length()
        {
            double total = 0;
            for (int i = 1; i < count; i++)
            {
                total += Distance(points[i - 1], points[i]);
            }
            return total;
        }

        // Euclidean distance.
        private double Distance(Point a, Point b)
        {
            double dx = a.X - b.X;
            double dy = a.Y - b.Y;
            return Math.Sqrt(dx * dx + dy * dy);
        }
    }
}
